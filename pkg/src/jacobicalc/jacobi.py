"""The cocycle-deformed layer: Schouten-Jacobi bracket, gauged differential,
deformed Lie differentials, canonical degree-2 elements and their homology
operators, and the classical bivector/vector-field pair checks.

Everything here is parameterized by a ``JacobiAlgebroid``: a validated
algebroid together with a closed 1-form phi.  The deformed bracket is

    [[X, Y]]~ = [[X, Y]] + x X ^ i_phi Y - (-1)^x y i_phi X ^ Y,

with shifted degrees x = |X|-1, y = |Y|-1, and the deformed differential
is d~ mu = d mu + phi ^ mu, equivalently the Cartan formula over the
deformed bracket (both routes are implemented; suites compare them).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .algebroid import (
    AlgebroidSpec,
    InvalidSpec,
    cartan_differential,
    ext_derivative,
    is_cocycle,
    lie_derivative,
    schouten,
)
from .exterior import (
    Coeff,
    ModelMismatch,
    MultiVector,
    contract_cov,
    deg_op,
    evaluate,
    interior,
    wedge,
)
from . import linalg


class JacobiAlgebroid:
    """A validated algebroid paired with a d-closed 1-form."""

    def __init__(self, spec: AlgebroidSpec, phi: MultiVector):
        spec.require_valid()
        if phi.dual == spec.sections_dual:
            raise ModelMismatch("the 1-cocycle must be a form of the algebroid")
        if not (phi.is_zero() or (phi.is_homogeneous() and phi.degree() == 1)):
            raise ModelMismatch("the cocycle must be homogeneous of degree 1")
        if not is_cocycle(spec, phi):
            raise InvalidSpec("phi is not closed: d phi != 0")
        self.spec = spec
        self.phi = phi

    @property
    def model(self):
        return self.spec.model

    def zero_section_side(self) -> MultiVector:
        return MultiVector.zero(self.model, self.spec.sections_dual)

    def __repr__(self) -> str:
        return f"JacobiAlgebroid({self.spec!r})"


def sj_bracket(ja: JacobiAlgebroid, x: MultiVector, y: MultiVector) -> MultiVector:
    """Deformed Schouten bracket, bilinear over homogeneous components."""
    phi = ja.phi
    result = ja.zero_section_side()
    for p, xh in x.graded_components().items():
        for q, yh in y.graded_components().items():
            term = schouten(ja.spec, xh, yh)
            xs, ys = p - 1, q - 1
            if xs != 0:
                term = term + wedge(xh, contract_cov(phi, yh)).scale(xs)
            if ys != 0:
                sign_y = -ys if xs % 2 == 0 else ys
                term = term + wedge(contract_cov(phi, xh), yh).scale(sign_y)
            result = result + term
    return result


def sj_bracket_degwise(ja: JacobiAlgebroid, x: MultiVector, y: MultiVector) -> MultiVector:
    """Alternative expansion of the deformed bracket through the degree
    derivation:  [[X,Y]] + (Deg ^ i_phi)(X,Y) - X ^ i_phi Y + (-1)^x i_phi X ^ Y,
    where (Deg ^ i_phi)(X,Y) = Deg(X) ^ i_phi Y - (-1)^x i_phi X ^ Deg(Y).
    Used as a cross-check fixture against ``sj_bracket``."""
    phi = ja.phi
    result = ja.zero_section_side()
    for p, xh in x.graded_components().items():
        for q, yh in y.graded_components().items():
            xs = p - 1
            sgn = -1 if xs % 2 else 1
            term = schouten(ja.spec, xh, yh)
            term = term + wedge(deg_op(xh), contract_cov(phi, yh))
            term = term - wedge(contract_cov(phi, xh), deg_op(yh)).scale(sgn)
            term = term - wedge(xh, contract_cov(phi, yh))
            term = term + wedge(contract_cov(phi, xh), yh).scale(sgn)
            result = result + term
    return result


# -- deformed differential ------------------------------------------------------


def d_phi(ja: JacobiAlgebroid, mu: MultiVector) -> MultiVector:
    """d~ mu = d mu + phi ^ mu."""
    return ext_derivative(ja.spec, mu) + wedge(ja.phi, mu)


def d_phi_cartan(ja: JacobiAlgebroid, mu: MultiVector) -> MultiVector:
    """The same differential through the Cartan formula over the deformed
    bracket; an independent code path used by the consistency suites."""
    return cartan_differential(
        ja.spec, mu,
        bracket_vv=lambda a, b: sj_bracket(ja, a, b),
        bracket_vf=lambda a, f: sj_bracket(ja, a, f),
    )


def lie_phi(ja: JacobiAlgebroid, x: MultiVector, mu: MultiVector) -> MultiVector:
    """Deformed Lie differential L~_X = i_X d~ + (-1)^x d~ i_X.

    Also computed as L_X + i_{i_phi X} and both routes compared; a mismatch
    would mean a broken convention, so it raises immediately.
    """
    result = MultiVector.zero(ja.model, mu.dual)
    dmu = d_phi(ja, mu)
    for p, xh in x.graded_components().items():
        xs = p - 1
        first = interior(xh, dmu)
        second = d_phi(ja, interior(xh, mu))
        via_d = first - second if xs % 2 else first + second
        via_contraction = lie_derivative(ja.spec, xh, mu) + interior(
            contract_cov(ja.phi, xh), mu)
        if via_d != via_contraction:
            raise AssertionError("deformed Lie differential: the two defining routes disagree")
        result = result + via_d
    return result


def jacobi_lie(ja: JacobiAlgebroid, x: MultiVector, mu: MultiVector, a: int) -> MultiVector:
    """Weighted deformed Lie differential along X at weight a:

        L_X mu + (|mu| + a) i_{X_phi} mu - (-1)^x x phi ^ i_X mu,

    per homogeneous component of mu (the form degree |mu| enters).
    """
    result = MultiVector.zero(ja.model, mu.dual)
    for p, xh in x.graded_components().items():
        xs = p - 1
        x_phi = contract_cov(ja.phi, xh)
        for k, mu_k in mu.graded_components().items():
            term = lie_derivative(ja.spec, xh, mu_k)
            term = term + interior(x_phi, mu_k).scale(k + a)
            coeff = -xs if xs % 2 == 0 else xs
            if coeff != 0:
                term = term + wedge(ja.phi, interior(xh, mu_k)).scale(coeff)
            result = result + term
    return result


# -- canonical elements and homology operators -----------------------------------


class JacobiElement:
    """A degree-2 multisection P with [[P, P]]~ = 0, checked exactly."""

    def __init__(self, ja: JacobiAlgebroid, p: MultiVector):
        if not (p.is_zero() or (p.is_homogeneous() and p.degree() == 2)):
            raise ModelMismatch("a canonical element must have degree 2")
        if not sj_bracket(ja, p, p).is_zero():
            raise InvalidSpec("[[P, P]]~ != 0: not a canonical element")
        self.ja = ja
        self.p = p

    def __repr__(self) -> str:
        return f"JacobiElement({self.p!r})"


def lj_apply(je: JacobiElement, mu: MultiVector, a: int) -> MultiVector:
    """Degree -1 homology operator of a canonical element at weight a:

        mu |-> L_P mu + (|mu| + a) i_{P_phi} mu + phi ^ i_P mu.

    This is the weighted Lie differential at x = 1; squares to zero.
    """
    return jacobi_lie(je.ja, je.p, mu, a)


def lj_operator(je: JacobiElement, a: int) -> Callable[[MultiVector], MultiVector]:
    return lambda mu: lj_apply(je, mu, a)


def generating_bracket(je: JacobiElement, mu: MultiVector, nu: MultiVector,
                       a: int = 0) -> MultiVector:
    """Bracket on forms generated by the weighted operator's failure to be a
    derivation:

        (-1)^{|mu|} ( L(mu ^ nu) - L(mu) ^ nu - (-1)^{|mu|} mu ^ L(nu) ),

    independent of the weight a.  Bilinear over homogeneous components.
    """
    result = MultiVector.zero(je.ja.model, mu.dual)
    for k, mu_k in mu.graded_components().items():
        for nu_h in nu.graded_components().values():
            sign = -1 if k % 2 else 1
            term = lj_apply(je, wedge(mu_k, nu_h), a)
            term = term - wedge(lj_apply(je, mu_k, a), nu_h)
            term = term - wedge(mu_k, lj_apply(je, nu_h, a)).scale(sign)
            result = result + term.scale(sign)
    return result


def koszul_form_bracket(je: JacobiElement, mu: MultiVector, nu: MultiVector) -> MultiVector:
    """The induced bracket of 1-forms written through contractions:

        i_{P_mu} d~ nu - i_{P_nu} d~ mu + d~ <P, mu ^ nu>,

    with P_mu = i_mu P.  Agrees with ``generating_bracket`` on 1-forms (a
    pinned suite).
    """
    ja = je.ja
    for w in (mu, nu):
        if not (w.is_zero() or (w.is_homogeneous() and w.degree() == 1)):
            raise ModelMismatch("this route is defined for 1-forms")
    from .exterior import pairing
    p_mu = contract_cov(mu, je.p)
    p_nu = contract_cov(nu, je.p)
    scalar = pairing(je.p, wedge(mu, nu))
    f = MultiVector.function(ja.model, scalar, dual=mu.dual)
    return interior(p_mu, d_phi(ja, nu)) - interior(p_nu, d_phi(ja, mu)) + d_phi(ja, f)


# -- classical pairs on tangent models ---------------------------------------------


def check_classical_pair(spec: AlgebroidSpec, lam: MultiVector, gam: MultiVector) -> bool:
    """True when (lam, gam) is a bivector/vector pair with

        [[gam, lam]] = 0   and   [[lam, lam]] = -2 gam ^ lam.
    """
    if not schouten(spec, gam, lam).is_zero():
        return False
    lhs = schouten(spec, lam, lam)
    rhs = wedge(gam, lam).scale(-2)
    return lhs == rhs


def pair_bracket(spec: AlgebroidSpec, lam: MultiVector, gam: MultiVector,
                 u: Coeff, v: Coeff) -> Coeff:
    """First-order bracket of functions defined by a bivector/vector pair:

        {u, v} = (i_{du} lam)(v) + u gam(v) - v gam(u).
    """
    du = _d_function(spec, u)
    lam_u = contract_cov(du, lam)
    return (spec.anchor_apply(lam_u, v)
            + u * spec.anchor_apply(gam, v)
            - v * spec.anchor_apply(gam, u))


def hamiltonian_field(spec: AlgebroidSpec, lam: MultiVector, f: Coeff) -> MultiVector:
    """i_{df} lam, the field implementing {f, .} of the bivector part."""
    return contract_cov(_d_function(spec, f), lam)


def _d_function(spec: AlgebroidSpec, f: Coeff) -> MultiVector:
    comps = {}
    for i in range(1, spec.model.fiber_rank + 1):
        v = spec.anchor_apply(spec.section(i), f)
        if not v.is_zero():
            comps[1 << (i - 1)] = v
    return MultiVector(spec.model, not spec.sections_dual, comps)


# -- finite complexes over a point base ---------------------------------------------


class UnsupportedScale(ValueError):
    """Raised for homology requests on infinite-dimensional complexes."""


def _form_basis(model, dual: bool, degree: int) -> list[MultiVector]:
    out = []
    for mask in range(1 << model.fiber_rank):
        if bin(mask).count("1") == degree:
            out.append(MultiVector(model, dual, {mask: model.const_coeff(1)}))
    return out


def _operator_matrix(op, model, dual: bool, deg_from: int, deg_to: int) -> list[list[Fraction]]:
    src = _form_basis(model, dual, deg_from)
    dst_masks = [m for m in range(1 << model.fiber_rank)
                 if bin(m).count("1") == deg_to]
    rows = []
    for b in src:
        img = op(b)
        rows.append([img.coefficient(m).constant_value() for m in dst_masks])
    # matrix columns index the source basis
    return [[rows[j][i] for j in range(len(src))] for i in range(len(dst_masks))]


def finite_homology(je: JacobiElement, a: int) -> list[int]:
    """Homology dimensions of the weighted degree -1 operator, top degree down
    to 0, over a point base (exact ranks by Gaussian elimination)."""
    model = je.ja.model
    if model.base_dim != 0 or model.has_time:
        raise UnsupportedScale("homology ranks are computed over a point base only")
    dual = not je.ja.spec.sections_dual
    op = lj_operator(je, a)
    r = model.fiber_rank
    dims = []
    for k in range(0, r + 1):
        d_k = _operator_matrix(op, model, dual, k, k - 1) if k >= 1 else [[]]
        d_k1 = _operator_matrix(op, model, dual, k + 1, k) if k + 1 <= r else None
        n_k = len(_form_basis(model, dual, k))
        rank_k = linalg.rank(d_k) if k >= 1 else 0
        rank_k1 = linalg.rank(d_k1) if d_k1 is not None else 0
        dims.append(n_k - rank_k - rank_k1)
    return dims


def finite_cohomology(spec: AlgebroidSpec, differential=None) -> list[int]:
    """Cohomology dimensions of a degree +1 operator (default: the exterior
    derivative) on the finite form complex over a point base."""
    model = spec.model
    if model.base_dim != 0 or model.has_time:
        raise UnsupportedScale("cohomology ranks are computed over a point base only")
    dual = not spec.sections_dual
    op = differential if differential is not None else (lambda mu: ext_derivative(spec, mu))
    r = model.fiber_rank
    dims = []
    for k in range(0, r + 1):
        d_k = _operator_matrix(op, model, dual, k, k + 1) if k + 1 <= r else None
        d_km1 = _operator_matrix(op, model, dual, k - 1, k) if k >= 1 else None
        n_k = len(_form_basis(model, dual, k))
        rank_k = linalg.rank(d_k) if d_k is not None else 0
        rank_km1 = linalg.rank(d_km1) if d_km1 is not None else 0
        dims.append(n_k - rank_k - rank_km1)
    return dims
