"""Pipeline x tensor parallel placement of an inference LLM on a panel array.

Steady-state model: a stage of ``T`` panels runs ``blocks_per_stage`` blocks
for one token in ``blocks_per_stage * tau / T`` seconds, the pipeline keeps two
sessions per stage in flight, and every stage hands one activation per token to
its successor (tensor all-reduce traffic is folded into the factor ``T``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from iscr.errors import PlanningError

GB = 1e9
KB = 1e3
US = 1e-6

QUAD_WIDTHS = (1, 4)
DEFAULT_GRID_COLS = 12


class PlanWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LlmModelSpec:
    name: str
    context_length: int  # tokens
    num_blocks: int
    weights_total: float  # bytes, weights plus any KV budget folded in
    activation_size: float  # bytes/token handed between stages
    base_block_time: float  # s, one block on one panel for one token
    kv_per_block_per_session: float = 0.0  # bytes

    def __post_init__(self):
        if self.context_length < 1 or self.num_blocks < 1:
            raise PlanningError("context_length and num_blocks must be >= 1")
        if min(self.weights_total, self.activation_size, self.base_block_time) <= 0:
            raise PlanningError("weights, activation size and block time must be positive")
        if self.kv_per_block_per_session < 0:
            raise PlanningError("KV size must be >= 0")


@dataclass(frozen=True)
class PanelHardware:
    compute_power: float = 1000.0  # W
    peak_compute: float = 1000.0  # TFLOP/s
    memory_capacity: float = 64 * GB  # bytes per GPU
    link_bandwidth: float = 100 * GB  # bytes/s duplex per adjacent panel


@dataclass(frozen=True)
class ParallelPlan:
    panels: int
    pipeline_stages: int
    tensor_width: int
    blocks_per_stage: int
    sessions_in_flight: int


@dataclass(frozen=True)
class PlanMetrics:
    mem_per_gpu: float  # bytes
    bw_per_gpu: float  # bytes/s duplex
    rate_per_session: float  # tokens/s
    aggregate_rate: float  # tokens/s
    stage_time: float  # s


def make_plan(model: LlmModelSpec, panels: int, tensor_width: int,
              sessions_per_stage: int = 2) -> ParallelPlan:
    if tensor_width < 1 or panels < tensor_width or panels % tensor_width:
        raise PlanningError(f"tensor width {tensor_width} does not divide {panels} panels")
    stages = panels // tensor_width
    if stages > model.num_blocks:
        raise PlanningError(f"{stages} stages exceed the model's {model.num_blocks} blocks")
    if tensor_width not in QUAD_WIDTHS:
        warnings.warn(f"tensor width {tensor_width} does not map onto 2x2 panel quads", PlanWarning)
    if model.num_blocks % stages:
        warnings.warn(f"{model.num_blocks} blocks over {stages} stages is load-imbalanced",
                      PlanWarning)
    return ParallelPlan(panels, stages, tensor_width, math.ceil(model.num_blocks / stages),
                        sessions_per_stage * stages)


def stage_time(model: LlmModelSpec, plan: ParallelPlan) -> float:
    return plan.blocks_per_stage * model.base_block_time / plan.tensor_width


def aggregate_rate(model: LlmModelSpec, plan: ParallelPlan) -> float:
    return 1.0 / stage_time(model, plan)


def rate_per_session(model: LlmModelSpec, plan: ParallelPlan) -> float:
    return 1.0 / (plan.sessions_in_flight * stage_time(model, plan))


def memory_per_gpu(model: LlmModelSpec, plan: ParallelPlan) -> float:
    weights = model.weights_total / (plan.pipeline_stages * plan.tensor_width)
    kv = (plan.sessions_in_flight * plan.blocks_per_stage * model.kv_per_block_per_session
          / plan.tensor_width)
    return weights + kv


def bandwidth_per_gpu(model: LlmModelSpec, plan: ParallelPlan) -> float:
    return aggregate_rate(model, plan) * model.activation_size * plan.tensor_width


def plan_metrics(model: LlmModelSpec, plan: ParallelPlan) -> PlanMetrics:
    return PlanMetrics(
        mem_per_gpu=memory_per_gpu(model, plan),
        bw_per_gpu=bandwidth_per_gpu(model, plan),
        rate_per_session=rate_per_session(model, plan),
        aggregate_rate=aggregate_rate(model, plan),
        stage_time=stage_time(model, plan),
    )


def subarray_packing(total_panels: int, subarray_size: int,
                     sessions_per_subarray: int) -> tuple[int, int]:
    if subarray_size <= 0:
        raise PlanningError("subarray size must be positive")
    count = total_panels // subarray_size
    return count, count * sessions_per_subarray


@dataclass(frozen=True)
class FeasibilityCheck:
    name: str
    passed: bool
    value: float
    limit: float
    severity: str = "error"  # "warning" checks do not make a plan infeasible


@dataclass(frozen=True)
class FeasibilityReport:
    checks: tuple[FeasibilityCheck, ...]

    @property
    def feasible(self) -> bool:
        return all(c.passed for c in self.checks if c.severity == "error")

    @property
    def warnings(self) -> tuple[FeasibilityCheck, ...]:
        return tuple(c for c in self.checks if c.severity == "warning" and not c.passed)


def feasibility_check(model: LlmModelSpec, plan: ParallelPlan, hardware: PanelHardware,
                      grid_cols: int = DEFAULT_GRID_COLS) -> FeasibilityReport:
    bw = bandwidth_per_gpu(model, plan)
    mem = memory_per_gpu(model, plan)
    quads_ok = plan.tensor_width == 1 or (plan.tensor_width == 4 and grid_cols % 2 == 0)
    return FeasibilityReport((
        FeasibilityCheck("bandwidth", bw <= hardware.link_bandwidth, bw, hardware.link_bandwidth),
        FeasibilityCheck("memory", mem <= hardware.memory_capacity, mem, hardware.memory_capacity),
        FeasibilityCheck("stages", plan.pipeline_stages <= model.num_blocks,
                         plan.pipeline_stages, model.num_blocks),
        FeasibilityCheck("quad layout", quads_ok, plan.tensor_width, grid_cols, "warning"),
    ))


# Reference sample plans: (label, model, context, blocks, panels,
# P, T, mem GB/GPU, bw GB/s/GPU) and per-session token rates by (model, panels, T).
SAMPLE_PLANS = (
    ("16-panel, no tensor parallelism", "light", 100_000, 96, 16, 16, 1, 46.45, 0.55),
    ("16-panel w/tensor parallelism", "light", 100_000, 96, 16, 4, 4, 46.45, 2.2),
    ("384-panel light LLM", "light", 100_000, 96, 384, 96, 4, 1.94, 52.84),
    ("512-panel heavy LLM", "heavy", 500_000, 128, 512, 128, 4, 7.06, 14.51),
)
SAMPLE_RATES = (("light", 16, 1, 672.0), ("light", 16, 4, 2688.0), ("heavy", 512, 4, 553.0))


def _relative_lsq(coeffs: list[float]) -> float:
    """Minimise sum((c_i * u - 1)^2) over u."""
    return sum(coeffs) / sum(c * c for c in coeffs)


def fit_sample_plans() -> dict[str, dict[str, float]]:
    """Recover per-model weights and block time plus a shared activation size
    from the reference sample plans by relative least squares.

    Returns SI units (bytes, seconds)."""
    blocks = {row[1]: row[3] for row in SAMPLE_PLANS}
    context = {row[1]: row[2] for row in SAMPLE_PLANS}
    params: dict[str, dict[str, float]] = {}
    for name in blocks:
        # rate = T / (2 B tau)  ->  fit u = 1/tau
        inv_tau = _relative_lsq([t / (2 * blocks[name] * r)
                                 for m, _, t, r in SAMPLE_RATES if m == name])
        # mem = M / N with no KV term  ->  fit u = M
        weights = _relative_lsq([1.0 / (n * mem * GB)
                                 for _, m, _, _, n, _, _, mem, _ in SAMPLE_PLANS if m == name])
        params[name] = {"base_block_time": 1.0 / inv_tau, "weights_total": weights,
                        "num_blocks": blocks[name], "context_length": context[name]}
    # bw = a * T / stage_time, stage_time = ceil(B/P) * tau / T
    coeffs = []
    for _, m, _, b, _, p, t, _, bw in SAMPLE_PLANS:
        st = math.ceil(b / p) * params[m]["base_block_time"] / t
        coeffs.append(t / st / (bw * GB))
    activation = _relative_lsq(coeffs)
    for name in params:
        params[name]["activation_size"] = activation
    return params
