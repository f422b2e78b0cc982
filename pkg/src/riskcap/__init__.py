"""Capital requirements rho_{A,S} for general acceptance sets and eligible assets on finite scenario spaces."""

from .acceptance import (
    AcceptanceSpec,
    CappedLinear,
    Expectation,
    Exponential,
    Linear,
    Scenario,
    Shortfall,
    SpecError,
    TVaR,
    VaR,
    expected_utility,
    interior_membership,
    is_acceptable,
    spec_from_dict,
    spec_from_json,
    tvar_value,
    var_value,
)
from .dual import DualCertificate, best_certificate, dual_rho, dual_rho_illiquid, dual_vertices
from .engine import (
    EngineError,
    ExtendedValue,
    Method,
    Reason,
    RhoResult,
    Tag,
    classify_finiteness,
    lipschitz_bound,
    rho,
    rho_batch,
    rho_value,
)
from .illiquid import (
    Jump,
    PricingError,
    PricingFunctional,
    Segment,
    check_quasiconvexity,
    falsify_cashsub_jump,
    rho_illiquid,
)
from .properties import (
    CashSubVerdict,
    Criterion,
    Verdict,
    axiom_suite,
    cash_subadditivity_report,
    check_numeraire_identity,
    falsify_cash_subadditivity,
)
from .scenario import (
    EligibleAsset,
    EventMask,
    Position,
    ScenarioError,
    ScenarioParseError,
    ScenarioSpace,
    load_scenarios,
    parse_scenarios,
    save_scenarios,
)

__version__ = "0.1.0"
