"""Physical cost models for cooperative edge inference with DNN splitting.

Deterministic mappings from a per-slot resource decision and an exogenous
slot context to delays (local compute, uplink transmission, remote compute)
and energies (local compute, transmission). All quantities are in SI base
units: Hz, W, J, s. dB values appear only at configuration / reporting
boundaries, never inside these functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ValueError(f"cannot convert non-positive value {x} to dB")
    return 10.0 * math.log10(x)


def dbm_per_hz_to_w_per_hz(x_dbm_hz: float) -> float:
    return 10.0 ** (x_dbm_hz / 10.0) * 1e-3


class PowerBudgetError(ValueError):
    """The requested (SNR, bandwidth) pair needs more transmit power than available."""


@dataclass(frozen=True)
class SplitProfile:
    """A DNN seen as a sequence of splitting points.

    ``feature_counts[k]`` is the number of real-valued output features at
    splitting point k (the payload if we cut there); ``stage_flops[k]`` is
    the FLOP cost of the layers between splitting point k-1 and k.
    Index 0 is full offloading (raw data transmitted, no local compute by
    convention ``stage_flops[0]`` is irrelevant to any cost and kept at 0);
    the last index is full local computation, whose feature count is the
    output dimensionality and is never transmitted.
    """

    feature_counts: tuple[float, ...]
    stage_flops: tuple[float, ...]

    def __post_init__(self):
        if len(self.feature_counts) != len(self.stage_flops):
            raise ValueError("feature_counts and stage_flops must have equal length")
        if len(self.feature_counts) < 2:
            raise ValueError("a split profile needs at least two splitting points")
        if any(l < 1 for l in self.feature_counts):
            raise ValueError("every feature count must be >= 1")
        if any(f < 0 for f in self.stage_flops):
            raise ValueError("stage FLOP costs must be >= 0")
        cum, acc = [], 0.0
        for f in self.stage_flops:
            acc += f
            cum.append(acc)
        object.__setattr__(self, "_cum_flops", tuple(cum))

    @property
    def last_index(self) -> int:
        """Index J of full local computation."""
        return len(self.feature_counts) - 1

    @property
    def total_flops(self) -> float:
        return self._cum_flops[-1]

    def cumulative_flops(self, k: int) -> float:
        """FLOPs to compute all layers up to and including splitting point k."""
        if not 0 <= k <= self.last_index:
            raise ValueError(f"splitting point {k} outside 0..{self.last_index}")
        return self._cum_flops[k]

    @classmethod
    def from_csv(cls, path: str | Path) -> "SplitProfile":
        """Load from comma-separated text with header ``k,L,F``, k ascending from 0."""
        lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
        if not lines or [c.strip() for c in lines[0].split(",")] != ["k", "L", "F"]:
            raise ValueError(f"{path}: expected header 'k,L,F'")
        feats, flops = [], []
        for i, ln in enumerate(lines[1:]):
            cells = [c.strip() for c in ln.split(",")]
            if len(cells) != 3:
                raise ValueError(f"{path}: row {i + 1}: expected 3 columns, got {len(cells)}")
            if int(cells[0]) != i:
                raise ValueError(f"{path}: row {i + 1}: splitting points must ascend from 0")
            feats.append(float(cells[1]))
            flops.append(float(cells[2]))
        return cls(feature_counts=tuple(feats), stage_flops=tuple(flops))


@dataclass(frozen=True)
class DeviceParams:
    """Edge device compute and radio power limits."""

    f_l_min: float  # Hz
    f_l_max: float  # Hz
    eta_l: float  # FLOPs per CPU cycle
    kappa: float  # effective switched capacitance
    p_tx_max: float  # W

    def __post_init__(self):
        if not 0 < self.f_l_min <= self.f_l_max:
            raise ValueError("need 0 < f_l_min <= f_l_max")
        if self.eta_l <= 0 or self.kappa <= 0 or self.p_tx_max <= 0:
            raise ValueError("eta_l, kappa and p_tx_max must be positive")


@dataclass(frozen=True)
class ServerParams:
    """Edge cloud server compute capability."""

    f_r_max: float  # Hz
    eta_r: float  # FLOPs per CPU cycle

    def __post_init__(self):
        if self.f_r_max <= 0 or self.eta_r <= 0:
            raise ValueError("f_r_max and eta_r must be positive")


@dataclass(frozen=True)
class RadioParams:
    """Uplink radio parameters. SNR grid and noise PSD are linear."""

    n0: float  # W/Hz
    noise_figure: float  # linear, >= 1
    w_max: float  # Hz
    beta: float  # pulse roll-off
    snr_grid: tuple[float, ...]  # admissible target SNRs, linear

    def __post_init__(self):
        if self.n0 <= 0:
            raise ValueError("n0 must be positive")
        if self.noise_figure < 1:
            raise ValueError("linear noise figure must be >= 1")
        if self.w_max <= 0:
            raise ValueError("w_max must be positive")
        if not 0 <= self.beta <= 1:
            raise ValueError("roll-off beta must be in [0, 1]")
        if not self.snr_grid:
            raise ValueError("snr_grid must be non-empty")
        if any(g <= 0 for g in self.snr_grid):
            raise ValueError("snr_grid entries must be positive (linear)")
        if any(b <= a for a, b in zip(self.snr_grid, self.snr_grid[1:])):
            raise ValueError("snr_grid must be strictly increasing")

    @property
    def n0_eff(self) -> float:
        """Noise PSD referred to the receiver input, including the noise figure."""
        return self.n0 * self.noise_figure


@dataclass(frozen=True)
class SlotContext:
    """Exogenous randomness observed at the start of a slot."""

    t: int
    batch_size: int
    channel_gain: float  # |h|^2, linear power gain (path loss x fading)
    alpha_r: float  # server availability fraction in (0, 1]

    def __post_init__(self):
        if self.batch_size < 0:
            raise ValueError("batch_size must be >= 0")
        if self.channel_gain <= 0:
            raise ValueError("channel_gain must be positive")
        if not 0 < self.alpha_r <= 1:
            raise ValueError("alpha_r must be in (0, 1]")


@dataclass(frozen=True)
class ResourceDecision:
    """Per-slot control tuple: splitting point, target SNR, bandwidth, CPU clock.

    ``gamma`` is meaningful only when k < J (something is transmitted).
    The all-zero tuple (k=0, gamma=0, W=0, f_l=0) is the sentinel returned
    for empty slots and is exempt from the cross-field constraints below.
    """

    k: int
    gamma: float  # linear
    w: float  # Hz
    f_l: float  # Hz

    @property
    def is_idle(self) -> bool:
        return self.k == 0 and self.gamma == 0 and self.w == 0 and self.f_l == 0

    def validate(self, profile: SplitProfile, dev: DeviceParams, radio: RadioParams) -> None:
        """Check constraint-by-construction invariants; raises ValueError on violation."""
        if self.is_idle:
            return
        j = profile.last_index
        if not 0 <= self.k <= j:
            raise ValueError(f"k={self.k} outside 0..{j}")
        if self.k == j and self.w != 0:
            raise ValueError("full local computation must not allocate bandwidth")
        if self.k < j and not 0 < self.w <= radio.w_max:
            raise ValueError(f"bandwidth {self.w} outside (0, {radio.w_max}]")
        if self.k == 0 and self.f_l != 0:
            raise ValueError("full offloading must not run the local CPU")
        if self.k > 0 and not dev.f_l_min <= self.f_l <= dev.f_l_max:
            raise ValueError(f"f_l={self.f_l} outside [{dev.f_l_min}, {dev.f_l_max}]")


@dataclass(frozen=True)
class CostBreakdown:
    """Delays and energies of one slot, with the transmit power actually used."""

    d_local: float
    d_tx: float
    d_remote: float
    d_total: float
    e_local: float
    e_tx: float
    e_total: float
    p_tx: float


CostBreakdown.ZERO = CostBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def cumulative_flops(profile: SplitProfile, k: int) -> float:
    """FLOPs to reach splitting point k (sum of stage costs 0..k)."""
    return profile.cumulative_flops(k)


def local_cost(
    profile: SplitProfile,
    dev: DeviceParams,
    k: int,
    f_l: float,
    batch_size: int,
) -> tuple[float, float]:
    """Local compute delay [s] and energy [J] for a batch processed up to point k.

    Delay scales as 1/f_l, energy as f_l^2 (cubic CPU power model integrated
    over the compute time). k=0 means full offloading: no local compute.
    """
    if k == 0:
        return 0.0, 0.0
    if not 0 < k <= profile.last_index:
        raise ValueError(f"splitting point {k} outside 0..{profile.last_index}")
    if f_l <= 0:
        raise ValueError("local computation requires f_l > 0")
    if not dev.f_l_min <= f_l <= dev.f_l_max:
        raise ValueError(f"f_l={f_l} outside [{dev.f_l_min}, {dev.f_l_max}]")
    work = batch_size * profile.cumulative_flops(k)
    d = work / (dev.eta_l * f_l)
    e = work * dev.kappa * f_l**2 / dev.eta_l
    return d, e


def transmit_cost(
    profile: SplitProfile,
    radio: RadioParams,
    dev: DeviceParams,
    k: int,
    gamma: float,
    w: float,
    channel_gain: float,
    batch_size: int,
) -> tuple[float, float, float]:
    """Uplink delay [s], energy [J] and transmit power [W] for splitting point k.

    Features are complex-multiplexed two per symbol (the 1/2 factor); the
    pulse roll-off widens the occupied band by (1+beta). k=J transmits
    nothing. Raises PowerBudgetError if the implied power exceeds the
    device budget (callers must not request such a pair).
    """
    if k == profile.last_index:
        return 0.0, 0.0, 0.0
    if not 0 <= k < profile.last_index:
        raise ValueError(f"splitting point {k} outside 0..{profile.last_index}")
    if w <= 0:
        raise ValueError("transmission requires bandwidth > 0")
    if batch_size == 0:
        return 0.0, 0.0, 0.0
    p_tx = gamma * radio.n0_eff * w / channel_gain
    if p_tx > dev.p_tx_max * (1 + 1e-9):
        raise PowerBudgetError(
            f"required transmit power {p_tx:.4g} W exceeds budget {dev.p_tx_max:.4g} W"
        )
    d = (1 + radio.beta) * profile.feature_counts[k] * batch_size / (2 * w)
    return d, p_tx * d, p_tx


def remote_delay(
    profile: SplitProfile,
    srv: ServerParams,
    k: int,
    alpha_r: float,
    batch_size: int,
) -> float:
    """Server-side delay [s] to finish inference from splitting point k."""
    if alpha_r <= 0 or alpha_r > 1:
        raise ValueError("alpha_r must be in (0, 1]")
    if k == profile.last_index:
        return 0.0
    remaining = profile.total_flops - profile.cumulative_flops(k)
    return remaining * batch_size / (srv.eta_r * alpha_r * srv.f_r_max)


def slot_cost(
    profile: SplitProfile,
    dev: DeviceParams,
    srv: ServerParams,
    radio: RadioParams,
    decision: ResourceDecision,
    ctx: SlotContext,
) -> CostBreakdown:
    """Aggregate cost of one slot under a given decision."""
    if ctx.batch_size == 0 or decision.is_idle:
        return CostBreakdown.ZERO
    d_loc, e_loc = local_cost(profile, dev, decision.k, decision.f_l, ctx.batch_size)
    d_tx, e_tx, p_tx = transmit_cost(
        profile, radio, dev, decision.k, decision.gamma, decision.w,
        ctx.channel_gain, ctx.batch_size,
    )
    d_rem = remote_delay(profile, srv, decision.k, ctx.alpha_r, ctx.batch_size)
    return CostBreakdown(
        d_local=d_loc,
        d_tx=d_tx,
        d_remote=d_rem,
        d_total=d_loc + d_tx + d_rem,
        e_local=e_loc,
        e_tx=e_tx,
        e_total=e_loc + e_tx,
        p_tx=p_tx,
    )
