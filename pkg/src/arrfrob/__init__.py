"""Exact and numeric verification toolkit for weighted families of
parallelly translated hyperplanes: flag-space combinatorics, critical-set
algebra, connection operators, and the Frobenius-type structures built on
top of them."""

from .core import (
    ArrangementFamily,
    BasePoint,
    Circuit,
    ConfigError,
    check_unbalanced,
    circuits,
    is_good_fiber,
    load_family,
    sample_good_point,
)
from .osflag import (
    CoVector,
    FlagVector,
    SingularSubspace,
    contravariant_pairing,
    singular_subspace,
    v_vector,
)
from .critalg import (
    CriticalPoint,
    MasterFunction,
    expected_critical_count,
    identity_element,
    monomial_to_w,
    multiply,
    reduce_to_w_basis,
    residue_pairing_analytic,
    solve_critical,
    structural_pairing,
)
from .gaussmanin import (
    FlowResult,
    check_conformal_block,
    check_flatness,
    check_symmetry_and_invariance,
    derivative_sections,
    flow_flat_section,
    k_operator,
)
from .frobenius import (
    a_constant,
    alpha_structural,
    canonical_iso_analytic,
    eta_and_beta,
    naive_iso_and_constant,
    period_map,
    potential_first,
    potential_derivative_row,
    strata_restriction_k1,
)
from .cli import main, report_schema_version

__version__ = "0.1.0"

__all__ = [
    "ArrangementFamily",
    "BasePoint",
    "Circuit",
    "ConfigError",
    "CoVector",
    "CriticalPoint",
    "FlagVector",
    "FlowResult",
    "MasterFunction",
    "SingularSubspace",
    "a_constant",
    "alpha_structural",
    "canonical_iso_analytic",
    "check_conformal_block",
    "check_flatness",
    "check_symmetry_and_invariance",
    "check_unbalanced",
    "circuits",
    "contravariant_pairing",
    "derivative_sections",
    "eta_and_beta",
    "expected_critical_count",
    "flow_flat_section",
    "identity_element",
    "is_good_fiber",
    "k_operator",
    "load_family",
    "main",
    "monomial_to_w",
    "multiply",
    "naive_iso_and_constant",
    "period_map",
    "potential_derivative_row",
    "potential_first",
    "reduce_to_w_basis",
    "report_schema_version",
    "residue_pairing_analytic",
    "sample_good_point",
    "singular_subspace",
    "solve_critical",
    "strata_restriction_k1",
    "structural_pairing",
    "v_vector",
]
