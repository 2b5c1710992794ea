"""Verification lab: functionals, inequality checks and seeded suites."""

from .checks import (
    abstract_map,
    check_bridge,
    check_corollary_congruence,
    check_corollary_holder,
    check_corollary_schur,
    check_corollary_weighted_power,
    check_det_limit,
    check_hessian_psd,
    check_midpoint_convex,
    check_midpoint_logconvex,
    check_proof_chain,
    proof_chain,
)
from .functionals import (
    functional_congruence,
    functional_geodesic,
    log_functional_congruence,
    log_functional_geodesic,
    to_geodesic,
    trace_functional,
)
from .instances import CongruenceInstance, GeodesicInstance, instance_from_dict, random_instance
from .suites import SUITES, replay, search_counterexamples

__all__ = [
    "CongruenceInstance", "GeodesicInstance", "SUITES",
    "abstract_map", "check_bridge", "check_corollary_congruence", "check_corollary_holder",
    "check_corollary_schur", "check_corollary_weighted_power", "check_det_limit",
    "check_hessian_psd", "check_midpoint_convex", "check_midpoint_logconvex", "check_proof_chain",
    "functional_congruence", "functional_geodesic", "instance_from_dict",
    "log_functional_congruence", "log_functional_geodesic", "proof_chain", "random_instance",
    "replay", "search_counterexamples", "to_geodesic", "trace_functional",
]
