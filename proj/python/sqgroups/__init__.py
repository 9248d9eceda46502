"""Exact computer algebra for square groups.

Square groups are quadratic analogues of abelian groups: a diagram
M_e -H-> M_ee -P-> M_e with P a homomorphism into the center and H a
quadratic map. This package exposes the main operations of the C++ core:
the symmetric monoidal tensor product, the composition (box) product,
coproducts, spectrum homotopy groups, quadratic/square rings, and abelian
groups with cosymmetry.
"""

from _sqgroups import (  # noqa: F401
    acceptance,
    box,
    coproduct,
    cosym_roundtrip,
    hexagons,
    homotopy,
    invariants,
    pentagon,
    psi_values,
    registry_names,
    ring_validate,
    run_document,
    sigma_names,
    tensor,
    tor1,
    triangle,
    validate,
)

__all__ = [
    "acceptance", "box", "coproduct", "cosym_roundtrip", "hexagons", "homotopy",
    "invariants", "pentagon", "psi_values", "registry_names", "ring_validate",
    "run_document", "sigma_names", "tensor", "tor1", "triangle", "validate",
]
