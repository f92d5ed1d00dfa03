"""Verification toolkit for adapted complex tubes over pseudo-Hermitian manifolds."""

import json

from ._adaptube import (
    DegenerateContact,
    EvaluationError,
    HolomorphyFailure,
    LeftChartBox,
    Manifold,
    SchemaError,
    SingularContact,
    SpecError,
    SpecValidationError,
    Tube,
    __version__,
    check_names,
    holomorphy_residual,
    list_examples,
    reeb_flow,
    sigma_flow,
    verify_json,
)


def verify(example="", spec="", **kwargs):
    """Run the check suite and return the report as a dict."""
    return json.loads(verify_json(example=example, spec=spec, **kwargs))


__all__ = [
    "DegenerateContact",
    "EvaluationError",
    "HolomorphyFailure",
    "LeftChartBox",
    "Manifold",
    "SchemaError",
    "SingularContact",
    "SpecError",
    "SpecValidationError",
    "Tube",
    "__version__",
    "check_names",
    "holomorphy_residual",
    "list_examples",
    "reeb_flow",
    "sigma_flow",
    "verify",
    "verify_json",
]
