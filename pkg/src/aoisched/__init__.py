"""Age-of-information aware UAV route scheduling."""

from .aoi import (
    AoiState,
    CostTable,
    DeliveryEvent,
    ReplayError,
    RunReport,
    SolveResult,
    delivery_cost,
    interval_cost,
    replay,
)
from .greedy import greedy_solve
from .instances import (
    GeneratorError,
    has_hamiltonian_path,
    parse_edge_list,
    random_instance,
    reduction_instance,
)
from .labeling import GlaResult, Label, LabelStore, reconstruct
from .labeling import solve as gla_solve
from .model import (
    Charge,
    CostFn,
    ExponentialCost,
    Fly,
    Instance,
    LinearCost,
    PiecewiseLinearCost,
    QuadraticCost,
    RechargeSpec,
    Schedule,
    StepCost,
    cost_fn_from_dict,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    quantize,
    save_instance,
    validate,
)
from .oracle import OracleLimitError, oracle_solve, zero_cost_feasible
from .symmetric import (
    PolicyResult,
    SymmetricInstance,
    ages_after_trip,
    optimal_policy,
    sequence_cost,
    to_slotted_instance,
    trip_cost,
)

__version__ = "0.1.0"
