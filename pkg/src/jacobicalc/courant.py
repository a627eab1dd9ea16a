"""Brackets on E + E*: Courant, its cocycle deformation, the bialgebroid
variants, the non-skew circle operation, and constant Dirac subbundle checks.

A ``GeneralizedSection`` is a pair (X, xi) of a degree-1 multisection and a
degree-1 form over a common model.  The deformed bracket is verified two
ways: directly from the deformed calculus, and by transporting the plain
Courant bracket through the cylinder embedding X + xi |-> U(X) + hat_u_0(xi).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebroid import AlgebroidSpec, ext_derivative, lie_derivative
from .exterior import Coeff, ModelMismatch, MultiVector, interior, wedge
from .gauging import ExtendedAlgebroid
from .jacobi import JacobiAlgebroid, d_phi, lie_phi
from . import linalg
from .rings import Poly


class GeneralizedSection:
    """X + xi with X a degree-1 multisection and xi a degree-1 form."""

    __slots__ = ("vec", "form")

    def __init__(self, vec: MultiVector, form: MultiVector):
        if vec.dual == form.dual:
            raise ModelMismatch("need a section part and a dual part")
        for part in (vec, form):
            if not (part.is_zero() or (part.is_homogeneous() and part.degree() == 1)):
                raise ModelMismatch("generalized sections have degree exactly 1")
        self.vec = vec
        self.form = form

    @staticmethod
    def of(vec: MultiVector | None = None, form: MultiVector | None = None,
           model=None, sections_dual: bool = False) -> "GeneralizedSection":
        if vec is None:
            vec = MultiVector.zero(model if model else form.model, sections_dual)
        if form is None:
            form = MultiVector.zero(model if model else vec.model, not sections_dual)
        return GeneralizedSection(vec, form)

    def __add__(self, other: "GeneralizedSection") -> "GeneralizedSection":
        return GeneralizedSection(self.vec + other.vec, self.form + other.form)

    def __sub__(self, other: "GeneralizedSection") -> "GeneralizedSection":
        return GeneralizedSection(self.vec - other.vec, self.form - other.form)

    def __neg__(self) -> "GeneralizedSection":
        return GeneralizedSection(-self.vec, -self.form)

    def scale(self, c) -> "GeneralizedSection":
        return GeneralizedSection(self.vec.scale(c), self.form.scale(c))

    def cmul(self, coeff: Coeff) -> "GeneralizedSection":
        return GeneralizedSection(self.vec.cmul(coeff), self.form.cmul(coeff))

    def is_zero(self) -> bool:
        return self.vec.is_zero() and self.form.is_zero()

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, GeneralizedSection)
                and self.vec == other.vec and self.form == other.form)

    def __hash__(self) -> int:
        return hash((self.vec, self.form))

    def __repr__(self) -> str:
        return f"({self.vec!r}) + ({self.form!r})"


def pairing_plus(s1: GeneralizedSection, s2: GeneralizedSection) -> Coeff:
    """<X + xi, Y + eta>_+ = i_Y xi + i_X eta (symmetric)."""
    a = interior(s2.vec, s1.form).coefficient(0)
    b = interior(s1.vec, s2.form).coefficient(0)
    return a + b


def courant_bracket(spec: AlgebroidSpec, s1: GeneralizedSection,
                    s2: GeneralizedSection) -> GeneralizedSection:
    """[X,Y] + L_X eta - L_Y xi + (1/2) d(i_Y xi - i_X eta)."""
    x, xi = s1.vec, s1.form
    y, eta = s2.vec, s2.form
    vec = spec.bracket_sections(x, y)
    half = Fraction(1, 2)
    scalar = interior(y, xi) - interior(x, eta)
    form = (lie_derivative(spec, x, eta) - lie_derivative(spec, y, xi)
            + ext_derivative(spec, scalar).scale(half))
    return GeneralizedSection(vec, form)


def courant_jacobi_bracket(ja: JacobiAlgebroid, s1: GeneralizedSection,
                           s2: GeneralizedSection) -> GeneralizedSection:
    """[X,Y] + L~_X eta - L~_Y xi + (1/2) d~(i_Y xi - i_X eta)."""
    x, xi = s1.vec, s1.form
    y, eta = s2.vec, s2.form
    vec = ja.spec.bracket_sections(x, y)
    half = Fraction(1, 2)
    scalar = interior(y, xi) - interior(x, eta)
    form = (lie_phi(ja, x, eta) - lie_phi(ja, y, xi)
            + d_phi(ja, scalar).scale(half))
    return GeneralizedSection(vec, form)


def courant_jacobi_gauged(ext: ExtendedAlgebroid, s1: GeneralizedSection,
                          s2: GeneralizedSection) -> GeneralizedSection:
    """The deformed bracket computed upstairs: embed through
    X + xi |-> U(X) + hat_u_0(xi), take the plain Courant bracket on the
    cylinder, pull back.  Must agree with ``courant_jacobi_bracket``."""
    up1 = GeneralizedSection(ext.embed_u(s1.vec), ext.embed_hat_u(s1.form, 0))
    up2 = GeneralizedSection(ext.embed_u(s2.vec), ext.embed_hat_u(s2.form, 0))
    up = courant_bracket(ext.spec, up1, up2)
    return GeneralizedSection(ext.unembed_u(up.vec), ext.unembed_hat_u(up.form, 0))


# -- the tangent-plus-line component formula ------------------------------------------


@dataclass
class PairSection:
    """((X, f), (alpha, g)) over a tangent model: the component form of a
    generalized section of the tangent-plus-line model."""

    x: MultiVector
    f: Coeff
    alpha: MultiVector
    g: Coeff


def wade_bracket(spec: AlgebroidSpec, s1: PairSection, s2: PairSection) -> PairSection:
    """The component formula for the deformed bracket on the tangent-plus-line
    model, written entirely in the base calculus; must equal the general
    deformed bracket under the pair identifications (a pinned suite)."""
    half = Fraction(1, 2)
    d = lambda h: ext_derivative(spec, MultiVector.function(spec.model, h, dual=True))
    lie = lambda v, w: lie_derivative(spec, v, w)
    ins = lambda v, w: interior(v, w).coefficient(0)
    x1, f1, a1, g1 = s1.x, s1.f, s1.alpha, s1.g
    x2, f2, a2, g2 = s2.x, s2.f, s2.alpha, s2.g
    vec = spec.bracket_sections(x1, x2)
    fout = spec.anchor_apply(x1, f2) - spec.anchor_apply(x2, f1)
    scalar = ins(x2, a1) - ins(x1, a2)
    form = (lie(x1, a2) - lie(x2, a1)
            + d(f1).cmul(g2) - d(f2).cmul(g1)
            + (d(scalar + f2 * g1 - f1 * g2)).scale(half)
            + a2.cmul(f1) - a1.cmul(f2))
    gout = (spec.anchor_apply(x1, g2) - spec.anchor_apply(x2, g1)
            + (scalar - f2 * g1 + f1 * g2).scale(half))
    return PairSection(vec, fout, form, gout)


# -- bialgebroid variants ---------------------------------------------------------------


class JacobiBialgebroid:
    """A Jacobi algebroid on E together with one on E* (over the same model),
    each with its own cocycle.  Compatibility of the two structures is a
    precondition, not re-derived: the circle-operation laws expose broken
    input data as failed checks."""

    def __init__(self, ja_e: JacobiAlgebroid, ja_dual: JacobiAlgebroid):
        if ja_e.spec.sections_dual or not ja_dual.spec.sections_dual:
            raise ModelMismatch("expected a section-side and a dual-side algebroid")
        if ja_e.model != ja_dual.model:
            raise ModelMismatch("the two sides must share the bundle model")
        self.ja_e = ja_e
        self.ja_dual = ja_dual

    @property
    def model(self):
        return self.ja_e.model

    @property
    def phi0(self) -> MultiVector:
        return self.ja_e.phi

    @property
    def x0(self) -> MultiVector:
        return self.ja_dual.phi

    @staticmethod
    def with_trivial_dual(ja: JacobiAlgebroid) -> "JacobiBialgebroid":
        """The bialgebroid with zero bracket, zero anchor and zero cocycle on
        the dual side; its circle operation reduces to the deformed Courant
        calculus of ``ja`` alone."""
        model = ja.model
        zero = model.zero_coeff()
        anchor = [[zero] * model.nvars for _ in range(model.fiber_rank)]
        dual_spec = AlgebroidSpec(model, anchor, {}, sections_dual=True)
        x0 = MultiVector.zero(model, dual=False)
        return JacobiBialgebroid(ja, JacobiAlgebroid(dual_spec, x0))


def bialgebroid_courant(jb: JacobiBialgebroid, s1: GeneralizedSection,
                        s2: GeneralizedSection) -> GeneralizedSection:
    """The undeformed two-sided bracket:

        ([X,Y]_E + L*_xi Y - L*_eta X - (1/2) d*(i_Y xi - i_X eta))
      + ([xi,eta]_* + L_X eta - L_Y xi + (1/2) d(i_Y xi - i_X eta)).
    """
    e, du = jb.ja_e.spec, jb.ja_dual.spec
    x, xi = s1.vec, s1.form
    y, eta = s2.vec, s2.form
    half = Fraction(1, 2)
    scalar = interior(y, xi) - interior(x, eta)
    vec = (e.bracket_sections(x, y)
           + lie_derivative(du, xi, y) - lie_derivative(du, eta, x)
           - ext_derivative(du, _form_fn(du, scalar)).scale(half))
    form = (du.bracket_sections(xi, eta)
            + lie_derivative(e, x, eta) - lie_derivative(e, y, xi)
            + ext_derivative(e, _form_fn(e, scalar)).scale(half))
    return GeneralizedSection(vec, form)


def cj_bialgebroid(jb: JacobiBialgebroid, s1: GeneralizedSection,
                   s2: GeneralizedSection) -> GeneralizedSection:
    """The two-cocycle deformation: the E-side Lie differentials and
    half-differential are deformed by phi0, and the skew pairing feeds the
    x0 correction into the vector part:

        ([X,Y]_E + L*_xi Y - L*_eta X - (1/2) d*(..) + (1/2)(i_Y xi - i_X eta) X0)
      + ([xi,eta]_* + L~_X eta - L~_Y xi + (1/2) d~(..)).

    With a trivial dual side this is exactly ``courant_jacobi_bracket``.
    """
    e, du = jb.ja_e.spec, jb.ja_dual.spec
    x, xi = s1.vec, s1.form
    y, eta = s2.vec, s2.form
    half = Fraction(1, 2)
    scalar = interior(y, xi) - interior(x, eta)
    vec = (e.bracket_sections(x, y)
           + lie_derivative(du, xi, y) - lie_derivative(du, eta, x)
           - ext_derivative(du, _form_fn(du, scalar)).scale(half)
           + jb.x0.cmul(scalar.coefficient(0)).scale(half))
    form = (du.bracket_sections(xi, eta)
            + lie_phi(jb.ja_e, x, eta) - lie_phi(jb.ja_e, y, xi)
            + d_phi(jb.ja_e, _form_fn(e, scalar)).scale(half))
    return GeneralizedSection(vec, form)


def loday_circ(jb: JacobiBialgebroid, s1: GeneralizedSection,
               s2: GeneralizedSection) -> GeneralizedSection:
    """The non-skew circle operation of the bialgebroid:

        (X + xi) o (Y + eta) = ([X,Y]_E + L*_xi Y - i_eta d* X + <Y, xi> X0)
                             + ([xi,eta]_* + L~_X eta - i_Y d~ xi).
    """
    e, du = jb.ja_e.spec, jb.ja_dual.spec
    x, xi = s1.vec, s1.form
    y, eta = s2.vec, s2.form
    vec = (e.bracket_sections(x, y)
           + lie_derivative(du, xi, y)
           - interior(eta, ext_derivative(du, x))
           + jb.x0.cmul(interior(y, xi).coefficient(0)))
    form = (du.bracket_sections(xi, eta)
            + lie_phi(jb.ja_e, x, eta)
            - interior(y, d_phi(jb.ja_e, xi)))
    return GeneralizedSection(vec, form)


def _form_fn(spec: AlgebroidSpec, scalar: MultiVector) -> MultiVector:
    """Rewrap a degree-0 value as a form of the given algebroid."""
    return MultiVector.function(spec.model, scalar.coefficient(0),
                                dual=not spec.sections_dual)


def pair_section_to_generalized(ja, ps: PairSection) -> GeneralizedSection:
    """Identify ((X, f), (alpha, g)) over the base tangent model with
    X + f e_last + alpha + g eps_last on the tangent-plus-line model."""
    from .models import lift_to_extended_rank
    model = ja.model
    r = model.fiber_rank
    vec = (lift_to_extended_rank(ps.x, model)
           + MultiVector.basis(model, r).cmul(ps.f))
    form = (lift_to_extended_rank(ps.alpha, model)
            + MultiVector.basis(model, r, dual=True).cmul(ps.g))
    return GeneralizedSection(vec, form)


def generalized_to_pair_section(s: GeneralizedSection, small) -> PairSection:
    """Inverse identification; components must avoid mixing."""
    from .models import restrict_rank
    model = s.vec.model
    bit = 1 << (model.fiber_rank - 1)
    x = restrict_rank(MultiVector(model, False,
                                  {m: c for m, c in s.vec.components.items() if not m & bit}),
                      small)
    alpha = restrict_rank(MultiVector(model, True,
                                      {m: c for m, c in s.form.components.items() if not m & bit}),
                          small)
    def down(c):
        p = c if isinstance(c, Poly) else c.poly_part()
        return Poly(small.nvars, {e[:small.nvars]: v for e, v in p.terms.items()})
    f = down(s.vec.coefficient(bit)) if bit in s.vec.components else Poly.zero(small.nvars)
    g = down(s.form.coefficient(bit)) if bit in s.form.components else Poly.zero(small.nvars)
    return PairSection(x, f, alpha, g)


def rho_apply(jb: JacobiBialgebroid, s: GeneralizedSection, f: Coeff) -> Coeff:
    """The combined anchor as a first-order operator:
    rho(X + xi)(f) = rho_E(X)(f) + rho_*(xi)(f) + (<phi0, X> + <X0, xi>) f."""
    zeroth = (interior(s.vec, jb.phi0).coefficient(0)
              + interior(jb.x0, s.form).coefficient(0))
    return (jb.ja_e.spec.anchor_apply(s.vec, f)
            + jb.ja_dual.spec.anchor_apply(s.form, f)
            + zeroth * f)


def cd_operator(jb: JacobiBialgebroid, f: Coeff) -> GeneralizedSection:
    """The unique generalized section D(f) with <D(f), s>_+ = rho(s)(f) for
    all s, assembled through the nondegenerate pairing on the basis and
    re-verified against the defining identity."""
    model = jb.model
    vec_comps = {}
    form_comps = {}
    for k in range(1, model.fiber_rank + 1):
        e_k = MultiVector.basis(model, k)
        eps_k = MultiVector.basis(model, k, dual=True)
        w = rho_apply(jb, GeneralizedSection.of(vec=e_k, model=model), f)
        v = rho_apply(jb, GeneralizedSection.of(form=eps_k, model=model), f)
        if not v.is_zero():
            vec_comps[1 << (k - 1)] = v
        if not w.is_zero():
            form_comps[1 << (k - 1)] = w
    out = GeneralizedSection(MultiVector(model, False, vec_comps),
                             MultiVector(model, True, form_comps))
    for k in range(1, model.fiber_rank + 1):
        for s in (GeneralizedSection.of(vec=MultiVector.basis(model, k), model=model),
                  GeneralizedSection.of(form=MultiVector.basis(model, k, dual=True),
                                        model=model)):
            if pairing_plus(out, s) != rho_apply(jb, s, f):
                raise AssertionError("pairing solve for the first-order operator failed")
    return out


# -- circle-operation laws -----------------------------------------------------------


def loday_identity_holds(jb: JacobiBialgebroid, s1: GeneralizedSection,
                         s2: GeneralizedSection, s3: GeneralizedSection) -> bool:
    """s1 o (s2 o s3) = (s1 o s2) o s3 + s2 o (s1 o s3)."""
    lhs = loday_circ(jb, s1, loday_circ(jb, s2, s3))
    rhs = (loday_circ(jb, loday_circ(jb, s1, s2), s3)
           + loday_circ(jb, s2, loday_circ(jb, s1, s3)))
    return lhs == rhs


def axiom1_holds(jb: JacobiBialgebroid, s1: GeneralizedSection,
                 s: GeneralizedSection) -> bool:
    """<s1 o s, s> = <s1, s o s>."""
    return pairing_plus(loday_circ(jb, s1, s), s) == pairing_plus(s1, loday_circ(jb, s, s))


def axiom2_holds(jb: JacobiBialgebroid, s1: GeneralizedSection,
                 s: GeneralizedSection) -> bool:
    """rho(s1)(<s, s>) = 2 <s1 o s, s>."""
    lhs = rho_apply(jb, s1, pairing_plus(s, s))
    rhs = pairing_plus(loday_circ(jb, s1, s), s).scale(2)
    return lhs == rhs


def symmetric_part_identity(jb: JacobiBialgebroid, s1: GeneralizedSection,
                            s2: GeneralizedSection) -> bool:
    """The symmetric part of o is the first-order operator of the pairing:
    <s1 o s2 + s2 o s1, b>_+ = <D<s1,s2>_+, b>_+ for every basis element b."""
    sym = loday_circ(jb, s1, s2) + loday_circ(jb, s2, s1)
    dpair = cd_operator(jb, pairing_plus(s1, s2))
    model = jb.model
    for k in range(1, model.fiber_rank + 1):
        for b in (GeneralizedSection.of(vec=MultiVector.basis(model, k), model=model),
                  GeneralizedSection.of(form=MultiVector.basis(model, k, dual=True),
                                        model=model)):
            if pairing_plus(sym, b) != pairing_plus(dpair, b):
                return False
    return True


# -- Dirac candidates (constant coefficients) ------------------------------------------


@dataclass
class DiracReport:
    isotropic: bool
    maximal: bool
    closed: bool
    witness: str | None = None
    induced_structure: dict[tuple[int, int], list[Coeff]] = field(default_factory=dict)
    induced_cocycle: list[Coeff] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.isotropic and self.maximal and self.closed


def _constant_coordinates(s: GeneralizedSection) -> list[Fraction]:
    model = s.vec.model
    out = []
    for part in (s.vec, s.form):
        for i in range(model.fiber_rank):
            c = part.coefficient(1 << i)
            p = c if isinstance(c, Poly) else c.poly_part()
            out.append(p.constant_value())
    return out


def dirac_check(jb: JacobiBialgebroid, generators: list[GeneralizedSection]) -> DiracReport:
    """Check a constant-coefficient candidate subbundle: isotropy of the
    pairing, maximality (rank = fiber rank), and closure of the circle
    operation inside the span over the function ring.  On success the
    induced structure functions and restricted cocycle are emitted."""
    model = jb.model
    r = model.fiber_rank
    try:
        cols = [_constant_coordinates(g) for g in generators]
    except ValueError:
        raise ModelMismatch("candidate generators must have constant coefficients")
    matrix = [[cols[j][i] for j in range(len(generators))] for i in range(2 * r)]
    if linalg.rank(matrix) != len(generators):
        raise ModelMismatch("generator list is linearly dependent")

    report = DiracReport(isotropic=True, maximal=(len(generators) == r), closed=True)
    for i, gi in enumerate(generators):
        for j in range(i, len(generators)):
            if not pairing_plus(gi, generators[j]).is_zero():
                report.isotropic = False
                report.witness = f"<g{i+1}, g{j+1}>_+ != 0"
                return report

    def poly_of(c: Coeff) -> Poly:
        return c if isinstance(c, Poly) else c.poly_part()

    for i, gi in enumerate(generators):
        for j, gj in enumerate(generators):
            out = loday_circ(jb, gi, gj)
            coords = []
            for part in (out.vec, out.form):
                for b in range(r):
                    coords.append(poly_of(part.coefficient(1 << b)))
            exponents = sorted({e for p in coords for e in p.terms})
            combo = [Poly.zero(model.nvars) for _ in generators]
            solvable = True
            for expo in exponents:
                vec = [p.terms.get(expo, Fraction(0)) for p in coords]
                sol = linalg.solve(matrix, vec)
                if sol is None:
                    solvable = False
                    break
                for idx, val in enumerate(sol):
                    if val != 0:
                        combo[idx] = combo[idx] + Poly(model.nvars, {expo: val})
            if not solvable:
                report.closed = False
                report.witness = f"g{i+1} o g{j+1} leaves the span"
                return report
            if i < j:
                report.induced_structure[(i + 1, j + 1)] = [
                    model.embed_coeff(p) if model.has_time else p for p in combo]
    for g in generators:
        val = (interior(g.vec, jb.phi0).coefficient(0)
               + interior(jb.x0, g.form).coefficient(0))
        report.induced_cocycle.append(val)
    return report
