"""Per-slot drift-plus-penalty controller and benchmark policies.

A pair of virtual queues turns the long-term delay and accuracy constraints
into per-slot penalties; each slot the controller minimizes

    mu*Z*d_total - lambda_y*Y*accuracy + V*e_total

over the splitting point and the target SNR, with bandwidth and local CPU
frequency given in closed form for every (k, gamma) pair. Benchmark
policies pin one of the discrete variables or drop the accuracy term.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .accuracy import AccuracyLUT, lut_lookup
from .models import (
    CostBreakdown,
    DeviceParams,
    RadioParams,
    ResourceDecision,
    ServerParams,
    SlotContext,
    SplitProfile,
    slot_cost,
)

IDLE_DECISION = ResourceDecision(k=0, gamma=0.0, w=0.0, f_l=0.0)


@dataclass(frozen=True)
class ControllerState:
    """Virtual queue backlogs plus the step sizes and trade-off weight.

    Z backs the average-delay constraint (target d_avg seconds), Y the
    average-accuracy constraint (target g_avg). Both stay non-negative.
    """

    z: float
    y: float
    mu: float
    lambda_y: float
    v: float
    d_avg: float
    g_avg: float

    def __post_init__(self):
        if self.z < 0 or self.y < 0:
            raise ValueError("virtual queues must be non-negative")
        if self.mu <= 0 or self.lambda_y < 0 or self.v <= 0:
            raise ValueError("need mu > 0, lambda_y >= 0, v > 0")
        if not 0 <= self.g_avg <= 1:
            raise ValueError("g_avg must lie in [0, 1]")


@dataclass(frozen=True)
class SlotDecisionReport:
    """What the controller chose for one slot and what it costs."""

    decision: ResourceDecision
    cost: CostBreakdown
    accuracy: float
    objective: float


class PolicyKind(enum.Enum):
    DYNAMIC = "dynamic"
    FLC = "flc"  # full local computation
    FIXED_SP = "fixed_sp"  # best fixed splitting point, SNR adapted
    FIXED_SNR = "fixed_snr"  # best fixed SNR, splitting point adapted
    ACCURACY_UNAWARE = "accuracy_unaware"  # accuracy queue disabled


def queue_update(state: ControllerState, d_total: float, accuracy: float) -> ControllerState:
    """Advance both virtual queues by one slot of realized delay and accuracy."""
    z = max(0.0, state.z + state.mu * (d_total - state.d_avg))
    y = max(0.0, state.y + state.lambda_y * (state.g_avg - accuracy))
    return replace(state, z=z, y=y)


def dpp_objective(state: ControllerState, cost: CostBreakdown, accuracy: float) -> float:
    """Drift-plus-penalty value of one slot outcome."""
    return (
        state.mu * state.z * cost.d_total
        - state.lambda_y * state.y * accuracy
        + state.v * cost.e_total
    )


def optimal_bandwidth(
    radio: RadioParams,
    dev: DeviceParams,
    gamma: float,
    k: int,
    channel_gain: float,
    last_index: int,
) -> float:
    """Widest feasible bandwidth for a (k, gamma) pair; 0 when nothing is sent.

    The objective is decreasing in W, so the optimum is W_max unless the
    transmit-power budget binds first.
    """
    if k == last_index:
        return 0.0
    return min(dev.p_tx_max * channel_gain / (gamma * radio.n0_eff), radio.w_max)


def optimal_frequency(state: ControllerState, dev: DeviceParams, k: int) -> float:
    """Local CPU clock minimizing delay-pressure-plus-energy; 0 when k = 0.

    Stationary point of mu*Z/f + V*kappa*f^2 terms: f = (mu*Z / (2*kappa*V))^(1/3),
    clamped to the device range.
    """
    if k == 0:
        return 0.0
    f = (state.mu * state.z / (2.0 * dev.kappa * state.v)) ** (1.0 / 3.0)
    return min(max(f, dev.f_l_min), dev.f_l_max)


def _candidate_objectives(
    state: ControllerState,
    profile: SplitProfile,
    dev: DeviceParams,
    srv: ServerParams,
    radio: RadioParams,
    lut: AccuracyLUT,
    ctx: SlotContext,
    ks: np.ndarray,
    g_idx: np.ndarray,
):
    """Vectorized objective over candidate (k, gamma) pairs plus the k=J action.

    Returns flattened arrays (k, gamma index or -1, objective, e_total) for
    the lexicographic argmin. Mirrors the scalar cost model term by term.
    """
    j = profile.last_index
    batch = ctx.batch_size
    cum = np.asarray(profile._cum_flops)
    feats = np.asarray(profile.feature_counts)
    gammas = np.asarray(radio.snr_grid)[g_idx]
    n0e = radio.n0_eff

    f_star = optimal_frequency(state, dev, 1)  # same interior value for every k > 0
    w_star = np.minimum(dev.p_tx_max * ctx.channel_gain / (gammas * n0e), radio.w_max)
    feasible = w_star > 0.0
    p_tx = gammas * n0e * w_star / ctx.channel_gain

    tx_ks = ks[ks < j]
    d_loc = np.where(tx_ks > 0, batch * cum[tx_ks] / (dev.eta_l * f_star), 0.0)
    e_loc = np.where(tx_ks > 0, batch * cum[tx_ks] * dev.kappa * f_star**2 / dev.eta_l, 0.0)
    d_rem = (cum[j] - cum[tx_ks]) * batch / (srv.eta_r * ctx.alpha_r * srv.f_r_max)
    with np.errstate(divide="ignore"):
        d_tx = (1 + radio.beta) * feats[tx_ks, None] * batch / (2 * w_star[None, :])
    e_tx = p_tx[None, :] * d_tx
    acc = lut.table[np.ix_(tx_ks, g_idx)]
    d_tot = d_loc[:, None] + d_rem[:, None] + d_tx
    e_tot = e_loc[:, None] + e_tx
    obj = state.mu * state.z * d_tot - state.lambda_y * state.y * acc + state.v * e_tot

    n_k, n_g = obj.shape
    flat_k = np.repeat(tx_ks, n_g)
    flat_g = np.tile(g_idx, n_k)
    flat_obj = obj.ravel()
    flat_e = e_tot.ravel()
    keep = np.tile(feasible, n_k)
    flat_k, flat_g = flat_k[keep], flat_g[keep]
    flat_obj, flat_e = flat_obj[keep], flat_e[keep]

    if j in ks:
        d_full = batch * cum[j] / (dev.eta_l * f_star)
        e_full = batch * cum[j] * dev.kappa * f_star**2 / dev.eta_l
        obj_full = state.mu * state.z * d_full - state.lambda_y * state.y * lut.noiseless + state.v * e_full
        flat_k = np.append(flat_k, j)
        flat_g = np.append(flat_g, -1)
        flat_obj = np.append(flat_obj, obj_full)
        flat_e = np.append(flat_e, e_full)

    return flat_k, flat_g, flat_obj, flat_e, f_star, w_star


def decide(
    state: ControllerState,
    profile: SplitProfile,
    dev: DeviceParams,
    srv: ServerParams,
    radio: RadioParams,
    lut: AccuracyLUT,
    ctx: SlotContext,
    fixed_k: int | None = None,
    fixed_gamma: float | None = None,
) -> SlotDecisionReport:
    """Pick the (k, gamma) pair minimizing the drift-plus-penalty objective.

    Bandwidth and CPU frequency come from their closed forms per pair.
    Ties break toward lower energy, then lower k, then lower gamma.
    ``fixed_k`` / ``fixed_gamma`` restrict the search (benchmark policies).
    Empty slots return the idle decision at zero cost.
    """
    j = profile.last_index
    if lut.last_index != j:
        raise ValueError("accuracy table and split profile disagree on the splitting-point count")
    if len(lut.snr_grid) != len(radio.snr_grid) or any(
        not math.isclose(a, b, rel_tol=1e-9) for a, b in zip(lut.snr_grid, radio.snr_grid)
    ):
        raise ValueError("accuracy table SNR grid does not match the radio SNR grid")
    if fixed_k is not None and not 0 <= fixed_k <= j:
        raise ValueError(f"pinned splitting point {fixed_k} outside 0..{j}")

    if ctx.batch_size == 0:
        return SlotDecisionReport(IDLE_DECISION, CostBreakdown.ZERO, lut.noiseless, 0.0)

    ks = np.array([fixed_k]) if fixed_k is not None else np.arange(j + 1)
    if fixed_gamma is not None:
        g_idx = np.array([lut.snr_index(fixed_gamma)])
    else:
        g_idx = np.arange(len(radio.snr_grid))

    flat_k, flat_g, flat_obj, flat_e, f_star, _ = _candidate_objectives(
        state, profile, dev, srv, radio, lut, ctx, ks, g_idx
    )
    if flat_obj.size == 0:
        raise ValueError("no feasible (k, gamma) candidate for this slot")

    gamma_key = np.where(flat_g >= 0, np.asarray(radio.snr_grid)[np.maximum(flat_g, 0)], 0.0)
    best = np.lexsort((gamma_key, flat_k, flat_e, flat_obj))[0]
    k = int(flat_k[best])
    if k == j:
        decision = ResourceDecision(k=j, gamma=0.0, w=0.0, f_l=f_star)
    else:
        gamma = float(radio.snr_grid[int(flat_g[best])])
        w = optimal_bandwidth(radio, dev, gamma, k, ctx.channel_gain, j)
        decision = ResourceDecision(k=k, gamma=gamma, w=w, f_l=f_star if k > 0 else 0.0)

    cost = slot_cost(profile, dev, srv, radio, decision, ctx)
    accuracy = lut_lookup(lut, decision.k, decision.gamma if decision.k < j else 0.0)
    return SlotDecisionReport(decision, cost, accuracy, dpp_objective(state, cost, accuracy))


@dataclass(frozen=True)
class PolicySpec:
    """A benchmark or dynamic policy, with its pinned value where applicable."""

    kind: PolicyKind
    fixed_k: int | None = None
    fixed_gamma: float | None = None  # linear

    @property
    def label(self) -> str:
        if self.kind is PolicyKind.FIXED_SP:
            return f"fixed_sp_{self.fixed_k}"
        if self.kind is PolicyKind.FIXED_SNR:
            return f"fixed_snr_{10.0 * math.log10(self.fixed_gamma):g}db"
        return self.kind.value


def policy_decide(
    policy: PolicySpec,
    state: ControllerState,
    profile: SplitProfile,
    dev: DeviceParams,
    srv: ServerParams,
    radio: RadioParams,
    lut: AccuracyLUT,
    ctx: SlotContext,
) -> SlotDecisionReport:
    """Run one slot of the given policy.

    FLC always computes everything locally; FIXED_SP / FIXED_SNR pin one
    discrete variable and optimize the rest; ACCURACY_UNAWARE drops the
    accuracy term (lambda_y = 0, Y frozen at 0); DYNAMIC is plain decide.
    """
    kind = policy.kind
    if kind is PolicyKind.DYNAMIC:
        return decide(state, profile, dev, srv, radio, lut, ctx)
    if kind is PolicyKind.FLC:
        return decide(state, profile, dev, srv, radio, lut, ctx, fixed_k=profile.last_index)
    if kind is PolicyKind.FIXED_SP:
        if policy.fixed_k is None or not 0 <= policy.fixed_k <= profile.last_index:
            raise ValueError(f"fixed splitting point {policy.fixed_k} outside 0..{profile.last_index}")
        return decide(state, profile, dev, srv, radio, lut, ctx, fixed_k=policy.fixed_k)
    if kind is PolicyKind.FIXED_SNR:
        if policy.fixed_gamma is None:
            raise ValueError("fixed_snr policy needs a pinned SNR")
        lut.snr_index(policy.fixed_gamma)  # raises if off-grid
        return decide(state, profile, dev, srv, radio, lut, ctx, fixed_gamma=policy.fixed_gamma)
    if kind is PolicyKind.ACCURACY_UNAWARE:
        blind = replace(state, y=0.0, lambda_y=0.0)
        return decide(blind, profile, dev, srv, radio, lut, ctx)
    raise ValueError(f"unknown policy kind {kind!r}")
