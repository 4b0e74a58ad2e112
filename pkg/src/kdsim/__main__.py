"""Allow ``python -m kdsim``."""

import sys

from .cli import main

sys.exit(main())
