"""Deadline-constrained offloading scheduler and VEC simulator bindings."""

from ._core import (
    Assignment,
    CertifyReport,
    Metrics,
    Scenario,
    __version__,
    certify,
    gen_scenario,
    load_scenario,
    save_scenario,
    simulate,
    solve,
)

__all__ = [
    "Assignment",
    "CertifyReport",
    "Metrics",
    "Scenario",
    "__version__",
    "certify",
    "gen_scenario",
    "load_scenario",
    "save_scenario",
    "simulate",
    "solve",
]
