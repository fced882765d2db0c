import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitsim.models import (
    CostBreakdown,
    PowerBudgetError,
    ResourceDecision,
    SlotContext,
    SplitProfile,
    cumulative_flops,
    local_cost,
    remote_delay,
    slot_cost,
    transmit_cost,
)


@pytest.fixture
def flops_profile():
    return SplitProfile(feature_counts=(100, 50, 10), stage_flops=(1e6, 2e6, 4e6))


class TestCumulativeFlops:
    def test_single_term(self, flops_profile):
        assert cumulative_flops(flops_profile, 0) == 1e6

    def test_partial_and_full_sums(self, flops_profile):
        # hand summation: 1e6 + 2e6 = 3e6; + 4e6 = 7e6
        assert cumulative_flops(flops_profile, 1) == 3e6
        assert cumulative_flops(flops_profile, 2) == 7e6
        assert cumulative_flops(flops_profile, 2) == flops_profile.total_flops

    def test_out_of_range(self, flops_profile):
        with pytest.raises(ValueError):
            cumulative_flops(flops_profile, 3)
        with pytest.raises(ValueError):
            cumulative_flops(flops_profile, -1)

    def test_non_decreasing(self, flops_profile):
        cums = [cumulative_flops(flops_profile, k) for k in range(3)]
        assert cums == sorted(cums)


class TestLocalCost:
    def test_full_offloading_is_free(self, small_profile, device):
        assert local_cost(small_profile, device, 0, 0.0, 7) == (0.0, 0.0)

    def test_hand_computed_values(self, device):
        # batch=5, 7e7 cumulative FLOPs, eta=50, f=1.4 GHz, kappa=1.097e-27
        profile = SplitProfile(feature_counts=(100, 10), stage_flops=(0.0, 7e7))
        d, e = local_cost(profile, device, 1, 1.4e9, 5)
        assert d == pytest.approx(5.0e-3, rel=1e-12)
        assert e == pytest.approx(1.505e-2, rel=1e-3)
        assert e == pytest.approx(5 * 7e7 * 1.097e-27 * 1.4e9**2 / 50, rel=1e-12)

    def test_frequency_scaling(self, small_profile, device):
        d1, e1 = local_cost(small_profile, device, 3, 5e8, 4)
        d2, e2 = local_cost(small_profile, device, 3, 1e9, 4)
        assert d2 == pytest.approx(d1 / 2)
        assert e2 == pytest.approx(4 * e1)

    def test_zero_frequency_rejected(self, small_profile, device):
        with pytest.raises(ValueError):
            local_cost(small_profile, device, 2, 0.0, 4)

    def test_monotone_in_k(self, small_profile, device):
        costs = [local_cost(small_profile, device, k, 5e8, 3) for k in range(1, 6)]
        ds = [c[0] for c in costs]
        es = [c[1] for c in costs]
        assert ds == sorted(ds)
        assert es == sorted(es)


class TestTransmitCost:
    def test_full_local_is_free(self, small_profile, radio, device):
        assert transmit_cost(small_profile, radio, device, 5, 10.0, 0.0, 1e-12, 5) == (0.0, 0.0, 0.0)

    def test_hand_computed_delay(self, radio, device):
        # L=2e5, batch=5, beta=0.25, W=1e7 -> 0.0625 s
        profile = SplitProfile(feature_counts=(2e5, 10), stage_flops=(0.0, 1e6))
        d, _, _ = transmit_cost(profile, radio, device, 0, 0.1, 1e7, 1.0, 5)
        assert d == pytest.approx(0.0625, rel=1e-12)

    def test_power_budget_enforced(self, small_profile, radio, device):
        # gamma=10 dB, |h|^2=3.162e-12, W=1e7 -> p_tx ~ 0.399 W > 0.3 W
        with pytest.raises(PowerBudgetError):
            transmit_cost(small_profile, radio, device, 1, 10.0, 1e7, 3.162e-12, 5)

    def test_power_value(self, small_profile, radio, device):
        # same point with a 0.45 W budget: p_tx = gamma*N0_eff*W/|h|^2
        from splitsim.models import DeviceParams

        roomy = DeviceParams(f_l_min=1e8, f_l_max=1.4e9, eta_l=50, kappa=1.097e-27, p_tx_max=0.45)
        _, _, p = transmit_cost(small_profile, radio, roomy, 1, 10.0, 1e7, 3.162e-12, 5)
        assert p == pytest.approx(10 * radio.n0_eff * 1e7 / 3.162e-12, rel=1e-12)
        assert p == pytest.approx(0.399, rel=2e-2)

    def test_bandwidth_scaling(self, small_profile, radio, device):
        d1, e1, p1 = transmit_cost(small_profile, radio, device, 2, 1.0, 1e6, 1e-11, 5)
        d2, e2, p2 = transmit_cost(small_profile, radio, device, 2, 1.0, 2e6, 1e-11, 5)
        assert d2 == pytest.approx(d1 / 2)
        assert p2 == pytest.approx(2 * p1)
        assert e2 == pytest.approx(e1)  # energy is W-invariant: p grows, d shrinks


class TestRemoteDelay:
    def test_full_local_is_free(self, small_profile, server):
        assert remote_delay(small_profile, server, 5, 0.5, 5) == 0.0

    def test_hand_computed_value(self, server):
        # remaining FLOPs 2e8, batch=5, eta_r=2000, alpha=0.5, f_r=4.5e9
        profile = SplitProfile(feature_counts=(10, 10), stage_flops=(0.0, 2e8))
        d = remote_delay(profile, server, 0, 0.5, 5)
        assert d == pytest.approx(2.222e-4, rel=1e-3)

    def test_availability_scaling(self, small_profile, server):
        d_half = remote_delay(small_profile, server, 2, 0.5, 5)
        d_full = remote_delay(small_profile, server, 2, 1.0, 5)
        assert d_half == pytest.approx(2 * d_full)

    def test_bad_alpha(self, small_profile, server):
        with pytest.raises(ValueError):
            remote_delay(small_profile, server, 2, 0.0, 5)


class TestSlotCost:
    def test_empty_batch_is_all_zero(self, small_profile, device, server, radio):
        ctx = SlotContext(t=1, batch_size=0, channel_gain=1e-12, alpha_r=0.5)
        dec = ResourceDecision(k=2, gamma=1.0, w=1e6, f_l=5e8)
        assert slot_cost(small_profile, device, server, radio, dec, ctx) == CostBreakdown.ZERO

    def test_full_local_has_no_radio_or_remote_cost(self, small_profile, device, server, radio):
        ctx = SlotContext(t=1, batch_size=5, channel_gain=1e-12, alpha_r=0.5)
        dec = ResourceDecision(k=5, gamma=0.0, w=0.0, f_l=1e9)
        cost = slot_cost(small_profile, device, server, radio, dec, ctx)
        assert cost.d_tx == cost.e_tx == cost.d_remote == cost.p_tx == 0.0
        assert cost.e_total == cost.e_local > 0

    def test_matches_component_recomputation(self, small_profile, device, server, radio):
        ctx = SlotContext(t=3, batch_size=4, channel_gain=2e-12, alpha_r=0.7)
        dec = ResourceDecision(k=2, gamma=1.0, w=5e6, f_l=8e8)
        cost = slot_cost(small_profile, device, server, radio, dec, ctx)
        d_loc, e_loc = local_cost(small_profile, device, 2, 8e8, 4)
        d_tx, e_tx, p = transmit_cost(small_profile, radio, device, 2, 1.0, 5e6, 2e-12, 4)
        d_rem = remote_delay(small_profile, server, 2, 0.7, 4)
        assert cost.d_local == d_loc and cost.e_local == e_loc
        assert cost.d_tx == d_tx and cost.e_tx == e_tx and cost.p_tx == p
        assert cost.d_remote == d_rem
        assert cost.d_total == d_loc + d_tx + d_rem
        assert cost.e_total == e_loc + e_tx

    @settings(max_examples=50, deadline=None)
    @given(
        k=st.integers(min_value=1, max_value=4),
        batch=st.integers(min_value=1, max_value=20),
        f_l=st.floats(min_value=1e8, max_value=1.4e9),
        gain=st.floats(min_value=1e-13, max_value=1e-10),
        alpha=st.floats(min_value=0.01, max_value=1.0),
    )
    def test_additivity_property(self, small_profile, device, server, radio, k, batch, f_l, gain, alpha):
        ctx = SlotContext(t=1, batch_size=batch, channel_gain=gain, alpha_r=alpha)
        gamma = radio.snr_grid[0]
        w = min(device.p_tx_max * gain / (gamma * radio.n0_eff), radio.w_max)
        dec = ResourceDecision(k=k, gamma=gamma, w=w, f_l=f_l)
        cost = slot_cost(small_profile, device, server, radio, dec, ctx)
        assert cost.d_total == cost.d_local + cost.d_tx + cost.d_remote
        assert cost.e_total == cost.e_local + cost.e_tx
        assert min(cost.d_total, cost.e_total, cost.p_tx) >= 0


class TestSplitProfileCsv:
    def test_roundtrip_from_file(self, tmp_path):
        path = tmp_path / "profile.csv"
        path.write_text("k,L,F\n0,100,0\n1,50,1e6\n2,10,2e6\n")
        profile = SplitProfile.from_csv(path)
        assert profile.last_index == 2
        assert profile.feature_counts == (100.0, 50.0, 10.0)
        assert profile.cumulative_flops(2) == 3e6

    def test_bad_header(self, tmp_path):
        path = tmp_path / "profile.csv"
        path.write_text("sp,L,F\n0,100,0\n")
        with pytest.raises(ValueError, match="k,L,F"):
            SplitProfile.from_csv(path)

    def test_non_ascending_index(self, tmp_path):
        path = tmp_path / "profile.csv"
        path.write_text("k,L,F\n0,100,0\n2,50,1e6\n")
        with pytest.raises(ValueError, match="ascend"):
            SplitProfile.from_csv(path)


class TestInvariantValidation:
    def test_decision_indicator_constraints(self, small_profile, device, radio):
        ResourceDecision(k=5, gamma=0.0, w=0.0, f_l=5e8).validate(small_profile, device, radio)
        with pytest.raises(ValueError):
            ResourceDecision(k=5, gamma=0.0, w=1e6, f_l=5e8).validate(small_profile, device, radio)
        with pytest.raises(ValueError):
            ResourceDecision(k=0, gamma=1.0, w=1e6, f_l=5e8).validate(small_profile, device, radio)
        with pytest.raises(ValueError):
            ResourceDecision(k=2, gamma=1.0, w=1e6, f_l=1e3).validate(small_profile, device, radio)

    def test_context_invariants(self):
        with pytest.raises(ValueError):
            SlotContext(t=1, batch_size=-1, channel_gain=1e-12, alpha_r=0.5)
        with pytest.raises(ValueError):
            SlotContext(t=1, batch_size=1, channel_gain=0.0, alpha_r=0.5)
        with pytest.raises(ValueError):
            SlotContext(t=1, batch_size=1, channel_gain=1e-12, alpha_r=1.5)
