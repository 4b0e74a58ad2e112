"""Signal sweeps along the pulse separation dt and the momentum spread delta_p.

Points are independent and may run in a process pool; rows always come back
in the order of the configured lists.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from . import gaussian
from .config import RunConfig, SweepSettings
from .exceptions import ConfigError, PreconditionError
from .interferometer import grid_signal, ramsey_borde_spec
from .models import DerivedParams, GaussianState, PulsePair
from .params import derive_params
from .wavepacket import gaussian_to_grid

if TYPE_CHECKING:
    import pandas as pd

logger = logging.getLogger(__name__)

SIGNAL_COLUMNS = ("dt_s", "theta_q_rad", "G", "P_closed", "P_full", "P_background", "abs_err")
ORACLE_COLUMNS = ("P_grid", "grid_abs_err")


@dataclass(frozen=True)
class SweepTable:
    """Named table of sweep rows, one tuple per point."""

    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def column(self, name: str) -> list[float]:
        """All values of one column."""
        try:
            index = self.columns.index(name)
        except ValueError:
            raise KeyError(f"{self.name}: no column {name!r}") from None
        return [row[index] for row in self.rows]

    def to_dataframe(self) -> pd.DataFrame:
        """Convert to a pandas DataFrame (needs the ``pandas`` extra)."""
        try:
            import pandas as pd
        except ImportError as e:
            raise ImportError(
                "SweepTable.to_dataframe requires pandas; install kdsim[pandas]"
            ) from e
        return pd.DataFrame(list(self.rows), columns=list(self.columns))

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
        }


@dataclass(frozen=True)
class SweepPoint:
    """Everything one worker needs to evaluate a single row."""

    state: GaussianState
    k: float
    dt: float
    xi1: float
    xi2: float
    alpha_l: complex
    beta_l: complex
    t_free: float
    with_oracle: bool = False
    grid_points: int = 65536


def evaluate_point(point: SweepPoint) -> tuple[float, ...]:
    """Closed-form, untruncated and (optionally) grid signal at one point."""
    pulses = PulsePair(point.xi1, point.xi2, point.alpha_l, point.beta_l, point.dt, point.t_free)
    closed = gaussian.signal(pulses, point.state, point.k)
    if closed.p_full is None:
        raise PreconditionError("closed-form signal carries no untruncated P_full")
    row: tuple[float, ...] = (
        point.dt,
        closed.theta_q,
        closed.visibility_G,
        closed.p_total,
        closed.p_full,
        closed.p_background,
        abs(closed.p_total - closed.p_full),
    )
    if point.with_oracle:
        grid = gaussian_to_grid(point.state.at(point.t_free), point.k, n_points=point.grid_points)
        spec = ramsey_borde_spec(
            point.t_free, point.dt, point.xi1, point.xi2, point.alpha_l, point.beta_l
        )
        p_grid = grid_signal(spec, grid, point.k).p_total
        row += (p_grid, abs(p_grid - closed.p_full))
    return row


def _evaluate(points: Sequence[SweepPoint], jobs: int) -> list[tuple[float, ...]]:
    if jobs < 1:
        raise PreconditionError(f"jobs: must be at least 1, got {jobs}")
    if jobs == 1 or len(points) < 2:
        return [evaluate_point(p) for p in points]
    # Executor.map yields in submission order.
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(evaluate_point, points))


def _points(
    sweep: SweepSettings,
    derived: DerivedParams,
    states: Iterable[tuple[GaussianState, float]],
    with_oracle: bool,
) -> list[SweepPoint]:
    xi1 = derived.xi if sweep.xi1 is None else sweep.xi1
    xi2 = derived.xi if sweep.xi2 is None else sweep.xi2
    return [
        SweepPoint(
            state=state,
            k=derived.k,
            dt=dt,
            xi1=xi1,
            xi2=xi2,
            alpha_l=sweep.alpha_l,
            beta_l=sweep.beta_l,
            t_free=sweep.t_free,
            with_oracle=with_oracle,
            grid_points=sweep.grid_points,
        )
        for state, dt in states
    ]


def run_sweep(config: RunConfig, with_oracle: bool = False, jobs: int = 1) -> list[SweepTable]:
    """Evaluate the dt axis and, when configured, the delta_p axis.

    Raises:
        ConfigError: If the config has no ``sweep`` block.
    """
    sweep = config.sweep
    if sweep is None:
        raise ConfigError("sweep: the config has no sweep block")
    cfg = config.physical
    derived = derive_params(cfg)
    mass = cfg.np_mass if sweep.mass is None else sweep.mass
    extra = ORACLE_COLUMNS if with_oracle else ()

    def packet(delta_p: float) -> GaussianState:
        return GaussianState(mass=mass, delta_p=delta_p, v_drift=cfg.v_drift, g_x=cfg.g_x)

    dt_states = ((packet(cfg.delta_p), dt) for dt in sweep.dt_list)
    dt_points = _points(sweep, derived, dt_states, with_oracle)
    tables = [SweepTable("dt", SIGNAL_COLUMNS + extra, tuple(_evaluate(dt_points, jobs)))]
    logger.info("dt sweep: %d points", len(dt_points))

    if sweep.delta_p_list:
        dp_states = ((packet(dp), sweep.reference_dt) for dp in sweep.delta_p_list)
        dp_points = _points(sweep, derived, dp_states, with_oracle)
        rows = _evaluate(dp_points, jobs)
        tables.append(
            SweepTable(
                "delta_p",
                ("delta_p", *SIGNAL_COLUMNS, *extra),
                tuple((p.state.delta_p, *row) for p, row in zip(dp_points, rows, strict=True)),
            )
        )
        logger.info("delta_p sweep: %d points at dt=%g s", len(dp_points), sweep.reference_dt)
    return tables
