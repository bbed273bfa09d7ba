"""Security deposits that make agreements self-enforcing in a finitely
repeated Prisoner's Dilemma."""

from .deposit import (
    Decomposition,
    DecompositionError,
    Policy,
    RefundSchedule,
    composite_deposit,
    decompose,
    max_fragment_deposit,
    deposit_with_trailing,
    refund_schedule,
)
from .explorer import Composition, enumerate_census, realize, summary_rows
from .fragment import (
    DepositPair,
    DominanceMode,
    Fragment,
    FragmentCounts,
    FragmentType,
    classify,
    fragment_payoff_vs_nash,
    fragment_deposit,
)
from .game import (
    REFERENCE_MATRIX,
    Agreement,
    InvalidMatrixError,
    PayoffMatrix,
    PayoffSummary,
    Player,
    StagePair,
    agreement_payoff,
    is_effective,
    nash_baseline,
    render,
    stage_payoff,
    validate_matrix,
)
from .verifier import (
    DeviationGain,
    VerificationReport,
    exhaustive_oracle,
    minimal_deposits,
    one_shot_gains,
    verify,
)

__version__ = "0.1.0"
