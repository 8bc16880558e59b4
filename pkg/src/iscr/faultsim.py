"""Seeded panel-failure simulation with greedy pipeline reconfiguration.

Panels live on a physical grid (12 panels per row by default).  Tensor-parallel
stages occupy axis-aligned 2x2 quads; the pipeline visits stages in serpentine
order.  After failures the surviving panels are re-grouped into stages, the
model's blocks are re-spread, and throughput retention is measured as the
ratio of the original to the new bottleneck stage time with the in-flight
session count held fixed.

Times are handled as integers in units of a quarter block-time so that
reconfiguration results are exact and reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from iscr.errors import ConfigurationError, PlanningError
from iscr.planner import DEFAULT_GRID_COLS, ParallelPlan

QUAD = 4
TILING_OFFSETS = ((0, 0), (0, 1), (1, 0), (1, 1))


class PanelState(IntEnum):
    ALIVE = 0
    FAILED = 1
    SPARE = 2


@dataclass(frozen=True)
class PanelGrid:
    states: np.ndarray  # (rows, cols) of PanelState values

    def __post_init__(self):
        if self.states.ndim != 2 or self.states.size == 0:
            raise ConfigurationError("panel grid must be a non-empty 2-D array")

    @property
    def rows(self) -> int:
        return self.states.shape[0]

    @property
    def cols(self) -> int:
        return self.states.shape[1]

    @property
    def usable(self) -> np.ndarray:
        return self.states != PanelState.FAILED

    def count(self, state: PanelState) -> int:
        return int(np.count_nonzero(self.states == state))

    @classmethod
    def from_rows(cls, rows) -> "PanelGrid":
        """Build from strings such as ``"AAXS"`` (A alive, X failed, S spare)."""
        code = {"A": PanelState.ALIVE, "X": PanelState.FAILED, "S": PanelState.SPARE}
        return cls(np.array([[code[ch] for ch in row] for row in rows], dtype=np.int8))

    @classmethod
    def for_plan(cls, plan: ParallelPlan, cols: int = DEFAULT_GRID_COLS,
                 spare_rows: int = 0) -> "PanelGrid":
        """Lay the plan's panels out serpentine-wise; leftover cells become spares."""
        t = plan.tensor_width
        if t == 1:
            rows = math.ceil(plan.panels / cols) + spare_rows
            states = np.full((rows, cols), PanelState.SPARE, dtype=np.int8)
            cells = sorted(((r, c) for r in range(rows) for c in range(cols)),
                           key=lambda rc: serpentine_key(*rc, band=1))
            for r, c in cells[:plan.panels]:
                states[r, c] = PanelState.ALIVE
        elif t == QUAD:
            if cols % 2:
                raise PlanningError("quad layout needs an even number of columns")
            rows = 2 * math.ceil(plan.pipeline_stages / (cols // 2)) + spare_rows
            states = np.full((rows, cols), PanelState.SPARE, dtype=np.int8)
            anchors = sorted(((r, c) for r in range(0, rows - 1, 2) for c in range(0, cols, 2)),
                             key=lambda rc: serpentine_key(*rc, band=2))
            for r, c in anchors[:plan.pipeline_stages]:
                states[r:r + 2, c:c + 2] = PanelState.ALIVE
        else:
            raise PlanningError(f"fault simulation supports tensor width 1 or 4, not {t}")
        return cls(states)


@dataclass(frozen=True)
class FailureProcess:
    annual_failure_probability: float
    horizon: float  # years
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.annual_failure_probability <= 1.0:
            raise ConfigurationError("annual failure probability must be in [0, 1]")
        if self.horizon < 0:
            raise ConfigurationError("horizon must be >= 0")


@dataclass(frozen=True)
class Stage:
    cells: tuple[tuple[int, int], ...]
    tensor_width: int
    blocks: int


@dataclass(frozen=True)
class ReconfigOutcome:
    plan: ParallelPlan | None  # None on total loss
    retained_rate_fraction: float
    unplaced_stages: int
    stages: tuple[Stage, ...] = ()


def serpentine_key(r: int, c: int, band: int = 2) -> tuple[int, int, int]:
    """Sort key walking bands of ``band`` rows, alternating direction."""
    b = r // band
    return b, c if b % 2 == 0 else -c, r % band


def inject_failures(grid: PanelGrid, process: FailureProcess, elapsed: float,
                    rng: np.random.Generator | None = None) -> PanelGrid:
    """Fail each alive panel independently with the probability accumulated
    over ``elapsed`` years.  One uniform draw is taken per cell whatever its
    state, so the stream position does not depend on earlier failures."""
    if elapsed < 0:
        raise ConfigurationError("elapsed time must be >= 0")
    if rng is None:
        rng = np.random.default_rng(process.seed)
    p = 1.0 - (1.0 - process.annual_failure_probability) ** elapsed
    draws = rng.random(grid.states.shape)
    states = grid.states.copy()
    states[(states == PanelState.ALIVE) & (draws < p)] = PanelState.FAILED
    return PanelGrid(states)


def _intact_windows(usable: np.ndarray) -> np.ndarray:
    """Boolean map of 2x2 windows (by top-left cell) whose four panels are usable."""
    return usable[:-1, :-1] & usable[1:, :-1] & usable[:-1, 1:] & usable[1:, 1:]


def _capacity(t4: int, quads: int, singles: int, cap: int) -> int:
    """Blocks placeable if no stage may exceed t4 quarter block-times."""
    return quads * min(t4, QUAD * cap) + singles * min(t4 // QUAD, cap)


def _min_bottleneck(quads: int, singles: int, blocks: int, cap: int) -> int | None:
    """Smallest bottleneck (quarter block-times) placing ``blocks``, or None."""
    hi = QUAD * blocks
    if _capacity(hi, quads, singles, cap) < blocks:
        return None
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _capacity(mid, quads, singles, cap) >= blocks:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _candidate_units(usable: np.ndarray, windows: np.ndarray | None, offset: tuple[int, int]):
    """Quad anchors and single cells available under one quad tiling, topped
    up first-fit with any other intact window left among the uncovered cells.
    ``windows`` is None when stages are single panels."""
    quads: list[tuple[int, int]] = []
    covered = np.zeros_like(usable)
    if windows is not None:
        r0, c0 = offset
        tiled = np.zeros_like(windows)
        tiled[r0::2, c0::2] = windows[r0::2, c0::2]
        for r, c in zip(*map(np.ndarray.tolist, np.nonzero(tiled))):
            quads.append((r, c))
            covered[r:r + 2, c:c + 2] = True
        leftover = windows & _intact_windows(~covered)
        for r, c in zip(*map(np.ndarray.tolist, np.nonzero(leftover))):
            if not covered[r:r + 2, c:c + 2].any():
                quads.append((r, c))
                covered[r:r + 2, c:c + 2] = True
    singles = list(zip(*map(np.ndarray.tolist, np.nonzero(usable & ~covered))))
    return quads, singles


def original_bottleneck(plan: ParallelPlan, num_blocks: int) -> int:
    return QUAD * math.ceil(num_blocks / plan.pipeline_stages) // plan.tensor_width


def replan(plan: ParallelPlan, grid: PanelGrid, num_blocks: int,
           max_blocks_per_panel: int | None = None) -> ReconfigOutcome:
    """Greedy re-placement of the pipeline on the surviving panels.

    Intact quads are claimed first, then single panels; at most the original
    number of stages is used and no stage is wider than the plan's tensor
    width.  Each of the four quad tilings of the grid is tried, topped up with
    any other intact windows, and the best kept (earliest tiling on ties).  ``max_blocks_per_panel`` models memory:
    a stage of T panels holds at most T times that many blocks.
    """
    t_plan = plan.tensor_width
    if t_plan not in (1, QUAD):
        raise PlanningError(f"fault simulation supports tensor width 1 or 4, not {t_plan}")
    cap = num_blocks if max_blocks_per_panel is None else max_blocks_per_panel
    usable = grid.usable
    quad_ok = t_plan == QUAD and min(usable.shape) >= 2
    offsets = TILING_OFFSETS if quad_ok else ((0, 0),)
    windows = _intact_windows(usable) if quad_ok else None

    target = original_bottleneck(plan, num_blocks)
    best = None
    for offset in offsets:
        quads, singles = _candidate_units(usable, windows, offset)
        q = min(len(quads), plan.pipeline_stages)
        s = min(len(singles), plan.pipeline_stages - q)
        t4 = _min_bottleneck(q, s, num_blocks, cap)
        if t4 is not None and (best is None or t4 < best[0]):
            best = (t4, quads[:q], singles[:s])
        if best is not None and best[0] <= target:
            break
    if best is None:
        return ReconfigOutcome(None, 0.0, plan.pipeline_stages)

    t4, quads, singles = best
    units = [((r, c), QUAD) for r, c in quads] + [(rc, 1) for rc in singles]
    units.sort(key=lambda u: serpentine_key(*u[0], band=2 if t_plan == QUAD else 1))
    stages, remaining = [], num_blocks
    for (r, c), width in units:
        if remaining == 0:
            break
        per_unit = min(t4, QUAD * cap) if width == QUAD else min(t4 // QUAD, cap)
        blocks = min(per_unit, remaining)
        if blocks == 0:
            continue
        cells = ((r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)) if width == QUAD else ((r, c),)
        stages.append(Stage(cells, width, blocks))
        remaining -= blocks

    new_plan = ParallelPlan(
        panels=sum(len(st.cells) for st in stages),
        pipeline_stages=len(stages),
        tensor_width=min(st.tensor_width for st in stages),
        blocks_per_stage=max(st.blocks for st in stages),
        sessions_in_flight=plan.sessions_in_flight,
    )
    full_width = sum(1 for st in stages if st.tensor_width == t_plan)
    retained = target / t4
    return ReconfigOutcome(new_plan, retained, max(0, plan.pipeline_stages - full_width),
                           tuple(stages))


@dataclass(frozen=True)
class ReplicaRecord:
    replica: int
    elapsed: float
    failed_count: int
    retained_fraction: float


@dataclass(frozen=True)
class CurvePoint:
    elapsed: float
    failed_fraction: float  # mean over replicas
    retained_rate: float  # mean over replicas


@dataclass(frozen=True)
class ResilienceCurve:
    points: tuple[CurvePoint, ...]
    records: tuple[ReplicaRecord, ...]


def resilience_curve(plan: ParallelPlan, process: FailureProcess, replicas: int,
                     num_blocks: int, steps: int = 10, grid: PanelGrid | None = None,
                     max_blocks_per_panel: int | None = None) -> ResilienceCurve:
    """Monte-Carlo sweep of retention over the process horizon.

    Each replica steps inject -> replan -> measure at ``steps`` equal intervals,
    with its own generator spawned from the process seed.  Failures only
    accumulate, so each replica's retention is non-increasing in time.
    """
    if replicas < 1:
        raise ConfigurationError("need at least one replica")
    if grid is None:
        grid = PanelGrid.for_plan(plan)
    population = grid.count(PanelState.ALIVE)
    times = [process.horizon * k / steps for k in range(steps + 1)]
    seeds = np.random.SeedSequence(process.seed).spawn(replicas)

    records = []
    for idx, seq in enumerate(seeds):
        rng = np.random.default_rng(seq)
        current, previous_t = grid, 0.0
        for t in times:
            current = inject_failures(current, process, t - previous_t, rng)
            previous_t = t
            outcome = replan(plan, current, num_blocks, max_blocks_per_panel)
            records.append(ReplicaRecord(idx, t, current.count(PanelState.FAILED),
                                         outcome.retained_rate_fraction))

    points = []
    for k, t in enumerate(times):
        at_t = records[k::len(times)]
        failed = math.fsum(r.failed_count for r in at_t) / (replicas * max(population, 1))
        retained = math.fsum(r.retained_fraction for r in at_t) / replicas
        points.append(CurvePoint(t, failed, retained))
    return ResilienceCurve(tuple(points), tuple(records))
