"""Standard concrete models used by the verification suites and the docs.

All builders return validated specs over the rationals.  The tangent-plus-
line model (rank n+1 over R^n, last basis element central with zero anchor,
cocycle eps^{n+1}) is the workhorse: its canonical degree-2 elements are
exactly the classical bivector/vector-field pairs.
"""

from __future__ import annotations

from fractions import Fraction

from .algebroid import AlgebroidSpec
from .exterior import BundleModel, Coeff, MultiVector, wedge
from .jacobi import JacobiAlgebroid
from .rings import Poly


def tangent_algebroid(n: int) -> AlgebroidSpec:
    """The tangent algebroid of R^n: identity anchor, zero structure."""
    model = BundleModel(n, n)
    zero = model.zero_coeff()
    one = model.const_coeff(1)
    anchor = [[one if a == i else zero for a in range(n)] for i in range(n)]
    return AlgebroidSpec(model, anchor)


def tangent_r_algebroid(n: int) -> JacobiAlgebroid:
    """Tangent-plus-line model: rank n+1 over R^n, e_{n+1} central with zero
    anchor, with the dual of e_{n+1} as the canonical cocycle."""
    model = BundleModel(n, n + 1)
    zero = model.zero_coeff()
    one = model.const_coeff(1)
    anchor = [[one if a == i else zero for a in range(n)] for i in range(n)]
    anchor.append([zero] * n)
    spec = AlgebroidSpec(model, anchor)
    phi = MultiVector.basis(model, n + 1, dual=True)
    return JacobiAlgebroid(spec, phi)


def lie_algebra_algebroid(structure: dict[tuple[int, int], dict[int, int]],
                          rank: int) -> AlgebroidSpec:
    """A Lie algebra seen as an algebroid over a point (integer structure
    constants, keys (i, j) with i < j)."""
    model = BundleModel(0, rank)
    anchor = [[] for _ in range(rank)]
    table = {
        key: {k: model.const_coeff(v) for k, v in col.items()}
        for key, col in structure.items()
    }
    return AlgebroidSpec(model, anchor, table)


def sl2_algebroid() -> AlgebroidSpec:
    """sl(2) over a point in the h, e, f basis:
    [e1,e2] = 2 e2, [e1,e3] = -2 e3, [e2,e3] = e1."""
    return lie_algebra_algebroid(
        {(1, 2): {2: 2}, (1, 3): {3: -2}, (2, 3): {1: 1}}, rank=3
    )


def nonabelian2_algebroid() -> JacobiAlgebroid:
    """The 2-dimensional nonabelian Lie algebra [e1, e2] = e2 over a point,
    paired with its canonical cocycle eps^1."""
    spec = lie_algebra_algebroid({(1, 2): {2: 1}}, rank=2)
    phi = MultiVector.basis(spec.model, 1, dual=True)
    return JacobiAlgebroid(spec, phi)


def abelian_algebroid(rank: int, base_dim: int = 0) -> AlgebroidSpec:
    model = BundleModel(base_dim, rank)
    anchor = [[model.zero_coeff()] * base_dim for _ in range(rank)]
    return AlgebroidSpec(model, anchor)


# -- tangent-model conveniences ---------------------------------------------------


def coordinate(spec: AlgebroidSpec, a: int) -> Coeff:
    """The coordinate function x_a (1-based) of the base."""
    return spec.model.coordinate(a - 1)


def coordinate_field(spec: AlgebroidSpec, a: int) -> MultiVector:
    """d/dx_a on a tangent model (just the a-th basis section)."""
    return spec.section(a)


def liouville_field(spec: AlgebroidSpec, fiber_vars: list[int]) -> MultiVector:
    """The fiberwise Euler field sum_i y_i d/dy_i over the given (1-based)
    coordinate indices, on a tangent model."""
    acc = MultiVector.zero(spec.model, spec.sections_dual)
    for i in fiber_vars:
        acc = acc + spec.section(i).cmul(coordinate(spec, i))
    return acc


def contact_r3() -> tuple[AlgebroidSpec, MultiVector, MultiVector]:
    """The contact pair on R^3 (coordinates x, y, z):

        lam = (d/dx + y d/dz) ^ d/dy,   gam = d/dz.

    The sign of gam is the one that makes (lam, gam) a classical pair under
    this package's bracket conventions (pinned by tests).
    """
    spec = tangent_algebroid(3)
    y = coordinate(spec, 2)
    dx, dy, dz = (spec.section(i) for i in (1, 2, 3))
    lam = wedge(dx + dz.cmul(y), dy)
    gam = dz
    return spec, lam, gam


# -- pair identifications on the tangent-plus-line model -----------------------------


def lift_to_extended_rank(x: MultiVector, big: BundleModel) -> MultiVector:
    """Reinterpret an element of the rank-n model inside the rank-(n+1) model
    over the same base (index masks are unchanged)."""
    return MultiVector(big, x.dual, dict(x.components))


def element_from_pair(ja: JacobiAlgebroid, lam: MultiVector, gam: MultiVector) -> MultiVector:
    """The degree-2 element lam + e_last ^ gam encoding a bivector/vector pair
    on the tangent-plus-line model.  With this orientation the canonical
    condition [[P, P]]~ = 0 is exactly the classical pair condition."""
    model = ja.model
    last = MultiVector.basis(model, model.fiber_rank)
    return lift_to_extended_rank(lam, model) + wedge(last, lift_to_extended_rank(gam, model))


def pair_from_element(p: MultiVector) -> tuple[MultiVector, MultiVector]:
    """Inverse of ``element_from_pair``: split P = lam + e_last ^ gam.

    The returned pieces still live on the big model (mask bit of e_last
    cleared); restrict with ``restrict_rank`` if needed."""
    model = p.model
    bit = 1 << (model.fiber_rank - 1)
    lam_comps = {m: c for m, c in p.components.items() if not m & bit}
    gam_comps = {}
    for m, c in p.components.items():
        if m & bit:
            rest = m ^ bit
            # e_last ^ e_S = (-1)^{|S|} e_{S+last} (last is the highest index)
            k = bin(rest).count("1")
            gam_comps[rest] = c if k % 2 == 0 else -c
    return (MultiVector(model, p.dual, lam_comps),
            MultiVector(model, p.dual, gam_comps))


def form_from_pair(ja: JacobiAlgebroid, mu: MultiVector, nu: MultiVector) -> MultiVector:
    """The form mu + eps_last ^ nu on the tangent-plus-line model (mu a
    k-form, nu a (k-1)-form on the base tangent factor)."""
    model = ja.model
    last = MultiVector.basis(model, model.fiber_rank, dual=True)
    return lift_to_extended_rank(mu, model) + wedge(last, lift_to_extended_rank(nu, model))


def form_to_pair(omega: MultiVector) -> tuple[MultiVector, MultiVector]:
    """Split omega = mu + eps_last ^ nu."""
    model = omega.model
    bit = 1 << (model.fiber_rank - 1)
    mu_comps = {m: c for m, c in omega.components.items() if not m & bit}
    nu_comps = {}
    for m, c in omega.components.items():
        if m & bit:
            rest = m ^ bit
            # eps_last ^ eps_S = (-1)^{|S|} eps_{S+last}
            k = bin(rest).count("1")
            nu_comps[rest] = c if k % 2 == 0 else -c
    return (MultiVector(model, omega.dual, mu_comps),
            MultiVector(model, omega.dual, nu_comps))


def restrict_rank(x: MultiVector, small: BundleModel) -> MultiVector:
    """Drop back to the rank-n model (components must avoid the last index)."""
    bit = 1 << (small.fiber_rank)
    if any(m >> small.fiber_rank for m in x.components):
        raise ValueError("element involves the extra fiber direction")
    return MultiVector(small, x.dual, dict(x.components))
