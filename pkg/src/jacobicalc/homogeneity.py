"""Homogeneity toolkit on tangent models: building bivector/vector pairs out
of homogeneous Poisson data and classifying linear and affine structures.

All operations work on a tangent algebroid of R^d with a designated set of
fiber coordinates (1-based indices); ``delta`` defaults to the fiberwise
Euler field over those coordinates.  Homogeneity of a tensor T of degree k
means [[delta, T]] = k T; a monomial tensor with fiber-polynomial degree p
and q fiber-direction legs has k = p - q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebroid import AlgebroidSpec, schouten
from .exterior import Coeff, MultiVector, wedge
from .jacobi import check_classical_pair, hamiltonian_field, pair_bracket
from .models import liouville_field
from .rings import Poly


class HomogeneityError(ValueError):
    """Raised when a precondition on homogeneity fails."""


def homogeneity_degree(spec: AlgebroidSpec, delta: MultiVector, t: MultiVector) -> Fraction:
    """The k with [[delta, T]] = k T; raises when T is not homogeneous."""
    if t.is_zero():
        raise HomogeneityError("the zero tensor has no homogeneity degree")
    b = schouten(spec, delta, t)
    k: Fraction | None = None
    for mask, coeff in t.components.items():
        bc = b.coefficient(mask)
        for expo, val in coeff.terms.items() if isinstance(coeff, Poly) else ():
            ratio = bc.terms.get(expo, Fraction(0)) / val
            if k is None:
                k = ratio
            elif k != ratio:
                raise HomogeneityError("tensor is not homogeneous for this Euler field")
    if k is None:
        raise HomogeneityError("could not determine a homogeneity degree")
    check = t.map_coefficients(lambda c: c.scale(k))
    if b != check:
        raise HomogeneityError("tensor is not homogeneous for this Euler field")
    return k


def require_homogeneous_poisson(spec: AlgebroidSpec, lam: MultiVector,
                                delta: MultiVector) -> None:
    if not schouten(spec, lam, lam).is_zero():
        raise HomogeneityError("[[lam, lam]] != 0: not a Poisson bivector")
    if schouten(spec, delta, lam) != -lam:
        raise HomogeneityError("[[delta, lam]] != -lam: bivector is not homogeneous")


@dataclass
class PairCriterion:
    """Both sides of the wedge criterion for (lam + gam ^ delta, gam).

    ``condition_holds`` is the wedge criterion

        gam ^ [[delta, gam]] ^ delta = [[gam, lam]] ^ delta,

    which is equivalent to the square condition [[lam', lam']] = -2 gam ^ lam'
    alone.  ``strict_condition_holds`` is the unwedged identity

        [[gam, lam]] = gam ^ [[delta, gam]],

    which is equivalent to the full classical-pair property (both square and
    commutation conditions); wedging with delta is lossy, so there are
    fields where the wedge criterion holds but the pair fails.  When gam is
    homogeneous, gam ^ [[delta, gam]] = 0 and the two criteria coincide.
    """

    condition_holds: bool
    strict_condition_holds: bool
    pair_holds: bool          # (lam + gam ^ delta, gam) is a classical pair
    lam_prime: MultiVector
    gam: MultiVector

    @property
    def agree(self) -> bool:
        return self.condition_holds == self.pair_holds

    @property
    def strict_agree(self) -> bool:
        return self.strict_condition_holds == self.pair_holds


def jacobi_pair_criterion(spec: AlgebroidSpec, lam: MultiVector, gam: MultiVector,
                          delta: MultiVector) -> PairCriterion:
    """Evaluate the wedge criterion, its unwedged strengthening, and the
    classical-pair property for (lam + gam ^ delta, gam), all independently,
    for homogeneous Poisson lam.  ``strict_agree`` holds for every input;
    ``agree`` holds whenever gam ^ [[delta, gam]] ^ delta carries the full
    information of gam ^ [[delta, gam]] (in particular for homogeneous gam).
    """
    require_homogeneous_poisson(spec, lam, delta)
    gd = wedge(gam, schouten(spec, delta, gam))
    gl = schouten(spec, gam, lam)
    lam_prime = lam + wedge(gam, delta)
    return PairCriterion(
        condition_holds=(wedge(gd, delta) == wedge(gl, delta)),
        strict_condition_holds=(gl == gd),
        pair_holds=check_classical_pair(spec, lam_prime, gam),
        lam_prime=lam_prime,
        gam=gam,
    )


def pair_from_invariant_field(spec: AlgebroidSpec, lam: MultiVector, gam: MultiVector,
                              delta: MultiVector) -> tuple[MultiVector, MultiVector]:
    """Build the pair (lam + gam ^ delta, gam) from a homogeneous field gam
    with [[gam, lam]] = 0; raises when the hypotheses fail."""
    require_homogeneous_poisson(spec, lam, delta)
    homogeneity_degree(spec, delta, gam)
    if not schouten(spec, gam, lam).is_zero():
        raise HomogeneityError("[[gam, lam]] != 0")
    lam_prime = lam + wedge(gam, delta)
    if not check_classical_pair(spec, lam_prime, gam):
        raise HomogeneityError("constructed pair fails the classical conditions")
    return lam_prime, gam


def pair_from_hamiltonian(spec: AlgebroidSpec, lam: MultiVector, f: Coeff,
                          delta: MultiVector, fiber_vars: list[int],
                          ) -> tuple[MultiVector, MultiVector, int]:
    """Build the pair from a fiber-homogeneous function f of degree k, with
    gam the field implementing {f, .} of lam.  Returns (lam', gam, k)."""
    require_homogeneous_poisson(spec, lam, delta)
    idx = [i - 1 for i in fiber_vars]
    k, part = f.homogeneous_component(idx)
    if part != f:
        raise HomogeneityError("f is not fiber-homogeneous")
    gam = hamiltonian_field(spec, lam, f)
    lam_prime, gam = pair_from_invariant_field(spec, lam, gam, delta)
    return lam_prime, gam, k


def tangency_identity_holds(spec: AlgebroidSpec, lam_prime: MultiVector,
                            gam: MultiVector, f: Coeff, k: int, g: Coeff) -> bool:
    """For the hamiltonian-built pair and k != 0, the bracket with f - 1/k
    satisfies {f - 1/k, g} = (f - 1/k)(1 - k) gam(g): the structure is
    tangent to the level set f = 1/k."""
    if k == 0:
        raise HomogeneityError("tangency statement needs k != 0")
    shift = f - spec.model.const_coeff(Fraction(1, k))
    lhs = pair_bracket(spec, lam_prime, gam, shift, g)
    rhs = shift.scale(1 - k) * spec.anchor_apply(gam, g)
    return lhs == rhs


# -- homogeneous parts of vector fields -------------------------------------------


def vertical_part(spec: AlgebroidSpec, gam: MultiVector, fiber_vars: list[int]) -> MultiVector:
    comps = {m: c for m, c in gam.components.items()
             if m.bit_length() in fiber_vars}
    return MultiVector(spec.model, gam.dual, comps)


def homogeneous_part_vf(spec: AlgebroidSpec, gam: MultiVector,
                        fiber_vars: list[int]) -> MultiVector:
    """Lowest fiber-degree homogeneous piece of the vertical components.

    Keeps only d/dy_i legs; among their coefficients, the smallest total
    fiber degree k present selects the part."""
    if gam.is_zero():
        raise HomogeneityError("homogeneous part of the zero field is undefined")
    idx = [i - 1 for i in fiber_vars]
    vert = vertical_part(spec, gam, fiber_vars)
    if vert.is_zero():
        raise HomogeneityError("field has no vertical component")
    k = min(c.homogeneous_component(idx)[0] for c in vert.components.values())
    comps = {}
    for mask, coeff in vert.components.items():
        part = coeff.graded_parts(idx).get(k)
        if part is not None and not part.is_zero():
            comps[mask] = part
    return MultiVector(spec.model, gam.dual, comps)


# -- linear and affine structures ----------------------------------------------------


def _is_fiber_linear(c: Coeff, idx: list[int]) -> bool:
    return all(sum(e[i] for i in idx) == 1 for e in c.terms)


def is_linear_structure(spec: AlgebroidSpec, lam_prime: MultiVector, gam: MultiVector,
                        fiber_vars: list[int]) -> bool:
    """Whether the pair bracket maps fiber-linear functions to fiber-linear
    functions (checked on all pairs of fiber coordinates)."""
    idx = [i - 1 for i in fiber_vars]
    for i in fiber_vars:
        for j in fiber_vars:
            if i >= j:
                continue
            b = pair_bracket(spec, lam_prime, gam,
                             spec.model.coordinate(i - 1), spec.model.coordinate(j - 1))
            if not (b.is_zero() or _is_fiber_linear(b, idx)):
                return False
    return True


@dataclass
class LinearSplit:
    """Outcome of splitting a linear structure (lam', gam)."""

    lam: MultiVector            # lam' - gam ^ delta, a homogeneous Poisson bivector
    gam0: MultiVector           # homogeneous part of gam
    lam_homogeneous: bool       # [[delta, lam]] = -lam
    lam_poisson: bool           # [[lam, lam]] = 0
    wedge_identity: bool        # [[gam, lam]] = gam ^ [[delta, gam]]
    gam0_commutes: bool         # [[gam0, lam]] = 0
    induced_pair: tuple[MultiVector, MultiVector]
    induced_pair_holds: bool


def split_linear_structure(spec: AlgebroidSpec, lam_prime: MultiVector,
                           gam: MultiVector, delta: MultiVector,
                           fiber_vars: list[int]) -> LinearSplit:
    """Split a linear classical pair (lam', gam) into the underlying
    homogeneous Poisson bivector lam = lam' - gam ^ delta and the pair
    induced by the homogeneous part of gam."""
    if not check_classical_pair(spec, lam_prime, gam):
        raise HomogeneityError("(lam', gam) is not a classical pair")
    if not is_linear_structure(spec, lam_prime, gam, fiber_vars):
        raise HomogeneityError("structure is not linear on fiber coordinates")
    lam = lam_prime - wedge(gam, delta)
    gam0 = homogeneous_part_vf(spec, gam, fiber_vars)
    induced = lam + wedge(gam0, delta)
    return LinearSplit(
        lam=lam,
        gam0=gam0,
        lam_homogeneous=(schouten(spec, delta, lam) == -lam),
        lam_poisson=schouten(spec, lam, lam).is_zero(),
        wedge_identity=(schouten(spec, gam, lam)
                        == wedge(gam, schouten(spec, delta, gam))),
        gam0_commutes=schouten(spec, gam0, lam).is_zero(),
        induced_pair=(induced, gam0),
        induced_pair_holds=check_classical_pair(spec, induced, gam0),
    )


@dataclass
class AffineClassification:
    gam0: MultiVector           # order -1 part (vertical lift)
    gam1: MultiVector           # order 0 part
    lam: MultiVector
    gam0_commutes: bool         # [[gam0, lam]] = 0
    gam1_relation: bool         # [[gam1, lam]] = gam0 ^ gam1


def classify_affine_structure(spec: AlgebroidSpec, lam_prime: MultiVector,
                              gam: MultiVector, delta: MultiVector,
                              fiber_vars: list[int]) -> AffineClassification:
    """Decompose the field of a linear-and-affine structure into its order -1
    and order 0 homogeneous parts and check the two bracket relations that
    classify such structures."""
    if not check_classical_pair(spec, lam_prime, gam):
        raise HomogeneityError("(lam', gam) is not a classical pair")
    idx = [i - 1 for i in fiber_vars]
    lam = lam_prime - wedge(gam, delta)
    gam0_comps, gam1_comps = {}, {}
    for mask, coeff in gam.components.items():
        vertical = mask.bit_length() in fiber_vars
        for d, part in coeff.graded_parts(idx).items():
            order = d - 1 if vertical else d
            if vertical and d == 0:
                gam0_comps[mask] = gam0_comps.get(mask, spec.model.zero_coeff()) + part
            elif order == 0:
                gam1_comps[mask] = gam1_comps.get(mask, spec.model.zero_coeff()) + part
            else:
                raise HomogeneityError(
                    "field is not affine: component of order other than -1, 0")
    gam0 = MultiVector(spec.model, gam.dual, gam0_comps)
    gam1 = MultiVector(spec.model, gam.dual, gam1_comps)
    return AffineClassification(
        gam0=gam0,
        gam1=gam1,
        lam=lam,
        gam0_commutes=schouten(spec, gam0, lam).is_zero(),
        gam1_relation=(schouten(spec, gam1, lam) == wedge(gam0, gam1)),
    )


def pair_from_vertical_cocycle(spec: AlgebroidSpec, lam: MultiVector,
                               phiv: MultiVector, delta: MultiVector,
                               ) -> tuple[MultiVector, MultiVector]:
    """The opposite-orientation presentation (lam + delta ^ phiv, -phiv) of a
    degree -1 homogeneous structure; equals the invariant-field construction
    applied to -phiv, and is verified as a classical pair."""
    lam_prime = lam + wedge(delta, phiv)
    gam = -phiv
    if not check_classical_pair(spec, lam_prime, gam):
        raise HomogeneityError("vertical-cocycle pair fails the classical conditions")
    return lam_prime, gam


__all__ = [
    "AffineClassification",
    "HomogeneityError",
    "LinearSplit",
    "PairCriterion",
    "classify_affine_structure",
    "homogeneity_degree",
    "homogeneous_part_vf",
    "is_linear_structure",
    "jacobi_pair_criterion",
    "liouville_field",
    "pair_from_hamiltonian",
    "pair_from_invariant_field",
    "pair_from_vertical_cocycle",
    "split_linear_structure",
    "tangency_identity_holds",
    "vertical_part",
]
