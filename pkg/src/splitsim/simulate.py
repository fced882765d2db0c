"""Stochastic slot-loop simulator and cross-policy comparison.

Each slot draws a Rayleigh-faded channel, a Poisson request batch and a
uniform server-availability fraction from independent substreams, asks the
chosen policy for a decision, and advances the virtual queues with the
realized delay and accuracy. Time averages are taken after a transient
prefix and only over slots that actually carried requests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .accuracy import AccuracyLUT
from .controller import ControllerState, PolicySpec, policy_decide, queue_update
from .models import DeviceParams, RadioParams, ServerParams, SlotContext, SplitProfile

TRACE_HEADER = "t,batch,h2,alpha_r,k,gamma_db,W,f_l,d_total,e_total,acc,Z,Y"


class SetupError(ValueError):
    """Configuration inconsistency detected before the first slot."""


class ComparisonError(ValueError):
    """Results being compared were not produced under matching conditions."""


@dataclass(frozen=True)
class EnvironmentParams:
    """Exogenous randomness of the wireless/computing environment."""

    path_loss: float  # linear attenuation, > 0 (configured in dB upstream)
    arrival_rate: float  # mean Poisson batch size per slot
    alpha_floor: float = 0.0  # minimum server availability

    def __post_init__(self):
        if self.path_loss <= 0:
            raise ValueError("path_loss must be positive")
        if self.arrival_rate < 0:
            raise ValueError("arrival_rate must be >= 0")
        if not 0 <= self.alpha_floor < 1:
            raise ValueError("alpha_floor must lie in [0, 1)")


@dataclass
class RngStreams:
    """Independent substreams so that e.g. the arrival process never
    perturbs the fading sample sequence."""

    fading: np.random.Generator
    arrivals: np.random.Generator
    availability: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RngStreams":
        f, a, v = np.random.SeedSequence(seed).spawn(3)
        return cls(
            fading=np.random.default_rng(f),
            arrivals=np.random.default_rng(a),
            availability=np.random.default_rng(v),
        )


def gen_slot_context(env: EnvironmentParams, streams: RngStreams, t: int) -> SlotContext:
    """Draw one slot of environment randomness.

    Rayleigh fading with unit-variance power gain (|h|^2 ~ Exp(1)) divided
    by the path loss; Poisson batch size; uniform server availability.
    """
    gain = streams.fading.exponential(1.0) / env.path_loss
    batch = int(streams.arrivals.poisson(env.arrival_rate))
    alpha = env.alpha_floor + (1.0 - env.alpha_floor) * streams.availability.uniform(0.0, 1.0)
    alpha = max(alpha, 1e-12)  # U(0,1) draws are half-open; keep alpha_r in (0,1]
    return SlotContext(t=t, batch_size=batch, channel_gain=gain, alpha_r=alpha)


@dataclass
class RunResult:
    """Post-transient time averages of one simulation run."""

    policy: str
    avg_energy: float  # J per busy slot
    avg_delay: float  # s per busy slot
    avg_accuracy: float
    avg_sp: float
    final_z_over_n: float
    final_y_over_n: float
    slots_counted: int
    v: float
    d_avg: float
    g_avg: float
    fingerprint: tuple = ()
    trace: list[str] | None = None

    def trace_csv(self) -> str:
        if self.trace is None:
            raise ValueError("run was executed without trace recording")
        return "\n".join([TRACE_HEADER, *self.trace]) + "\n"


@dataclass(frozen=True)
class ComparisonRow:
    policy: str
    avg_energy: float
    saving_pct: float  # energy saved vs the baseline
    avg_delay: float
    avg_accuracy: float
    avg_sp: float
    delay_ok: bool
    accuracy_ok: bool


@dataclass
class ComparisonTable:
    baseline: str
    rows: list[ComparisonRow] = field(default_factory=list)

    def to_csv(self) -> str:
        out = ["policy,avg_energy_j,saving_vs_baseline_pct,avg_delay_s,avg_accuracy,avg_sp,delay_ok,accuracy_ok"]
        for r in self.rows:
            out.append(
                f"{r.policy},{r.avg_energy!r},{r.saving_pct!r},{r.avg_delay!r},"
                f"{r.avg_accuracy!r},{r.avg_sp!r},{int(r.delay_ok)},{int(r.accuracy_ok)}"
            )
        return "\n".join(out) + "\n"


def run_simulation(
    policy: PolicySpec,
    profile: SplitProfile,
    dev: DeviceParams,
    srv: ServerParams,
    radio: RadioParams,
    lut: AccuracyLUT,
    env: EnvironmentParams,
    initial_state: ControllerState,
    n_slots: int,
    seed: int,
    transient_fraction: float = 0.1,
    record_trace: bool = False,
) -> RunResult:
    """Run one policy for ``n_slots`` slots; deterministic for a fixed seed.

    Queue updates are skipped on empty slots (no request, no drift), and all
    averages cover only post-transient slots with a non-empty batch.
    """
    if n_slots < 1:
        raise SetupError("n_slots must be >= 1")
    if not 0 <= transient_fraction < 1:
        raise SetupError("transient_fraction must lie in [0, 1)")
    if lut.last_index != profile.last_index:
        raise SetupError("accuracy table rows do not match the split profile")
    if len(lut.snr_grid) != len(radio.snr_grid) or any(
        not math.isclose(a, b, rel_tol=1e-9) for a, b in zip(lut.snr_grid, radio.snr_grid)
    ):
        raise SetupError("accuracy table SNR grid does not match the radio SNR grid")

    streams = RngStreams.from_seed(seed)
    state = initial_state
    if policy.kind.value == "accuracy_unaware":
        # the accuracy queue stays frozen for the whole run
        state = replace(state, y=0.0, lambda_y=0.0)

    cutoff = int(transient_fraction * n_slots)
    sum_e = sum_d = sum_acc = sum_k = 0.0
    counted = 0
    trace: list[str] | None = [] if record_trace else None

    for t in range(1, n_slots + 1):
        ctx = gen_slot_context(env, streams, t)
        report = policy_decide(policy, state, profile, dev, srv, radio, lut, ctx)
        if ctx.batch_size > 0:
            state = queue_update(state, report.cost.d_total, report.accuracy)
            if t > cutoff:
                counted += 1
                sum_e += report.cost.e_total
                sum_d += report.cost.d_total
                sum_acc += report.accuracy
                sum_k += report.decision.k
        if trace is not None:
            dec, cost = report.decision, report.cost
            gamma_db = 10.0 * math.log10(dec.gamma) if dec.gamma > 0 else 0.0
            trace.append(
                f"{t},{ctx.batch_size},{ctx.channel_gain!r},{ctx.alpha_r!r},{dec.k},"
                f"{gamma_db!r},{dec.w!r},{dec.f_l!r},{cost.d_total!r},{cost.e_total!r},"
                f"{report.accuracy!r},{state.z!r},{state.y!r}"
            )

    if counted == 0:
        avg_e = avg_d = avg_acc = avg_k = 0.0
    else:
        avg_e, avg_d = sum_e / counted, sum_d / counted
        avg_acc, avg_k = sum_acc / counted, sum_k / counted

    return RunResult(
        policy=policy.label,
        avg_energy=avg_e,
        avg_delay=avg_d,
        avg_accuracy=avg_acc,
        avg_sp=avg_k,
        final_z_over_n=state.z / n_slots,
        final_y_over_n=state.y / n_slots,
        slots_counted=counted,
        v=initial_state.v,
        d_avg=initial_state.d_avg,
        g_avg=initial_state.g_avg,
        fingerprint=(seed, n_slots, transient_fraction, env.path_loss, env.arrival_rate, env.alpha_floor),
        trace=trace,
    )


def summarize(results: list[RunResult], baseline: RunResult, slack: float = 0.05) -> ComparisonTable:
    """Energy savings of each result against a baseline run.

    All runs must share the environment fingerprint (same seed and slot
    count) so differences are purely policy-driven. ``slack`` is the
    relative tolerance for flagging the delay/accuracy constraints as met.
    """
    for r in results:
        if r.fingerprint != baseline.fingerprint:
            raise ComparisonError(
                f"run {r.policy!r} and baseline {baseline.policy!r} used different environments"
            )
    table = ComparisonTable(baseline=baseline.policy)
    for r in results:
        saving = 100.0 * (1.0 - r.avg_energy / baseline.avg_energy) if baseline.avg_energy > 0 else 0.0
        table.rows.append(
            ComparisonRow(
                policy=r.policy,
                avg_energy=r.avg_energy,
                saving_pct=saving,
                avg_delay=r.avg_delay,
                avg_accuracy=r.avg_accuracy,
                avg_sp=r.avg_sp,
                delay_ok=r.avg_delay <= r.d_avg * (1 + slack),
                accuracy_ok=r.avg_accuracy >= r.g_avg * (1 - slack),
            )
        )
    return table
