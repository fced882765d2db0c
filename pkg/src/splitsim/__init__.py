"""Energy-frugal DNN splitting at the wireless edge.

Cost models, a drift-plus-penalty per-slot controller, a stochastic slot
simulator with benchmark policies, and a config-driven experiment harness
exposed both as a FastAPI service and a thin-client CLI.
"""

from .accuracy import AccuracyLUT, SynthShape, load_lut, lut_lookup, save_lut, synth_lut
from .controller import (
    ControllerState,
    PolicyKind,
    PolicySpec,
    SlotDecisionReport,
    decide,
    dpp_objective,
    optimal_bandwidth,
    optimal_frequency,
    policy_decide,
    queue_update,
)
from .models import (
    CostBreakdown,
    DeviceParams,
    PowerBudgetError,
    RadioParams,
    ResourceDecision,
    ServerParams,
    SlotContext,
    SplitProfile,
    cumulative_flops,
    db_to_linear,
    linear_to_db,
    local_cost,
    remote_delay,
    slot_cost,
    transmit_cost,
)
from .simulate import (
    ComparisonTable,
    EnvironmentParams,
    RngStreams,
    RunResult,
    SetupError,
    gen_slot_context,
    run_simulation,
    summarize,
)

__version__ = "0.1.0"
