"""Concrete finite algebras for the operator calculus, and the bridges that
realize geometric data (multisections, contractions, degree operators) as
extensional operators on them.

Two bridge directions matter:

* an exterior algebra of a rank-r bundle over a point is itself a finite
  graded algebra, so the whole deformed bracket tabulates as a genus-2
  operator on it;
* multivector fields over a truncated polynomial ring (ideal-preserving
  ones) act as polyderivations, with the wedge product realized by the
  *reversed* operator product.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

from .exterior import BundleModel, MultiVector, contract_cov, deg_op
from .jacobi import JacobiAlgebroid, sj_bracket
from .opcalc import (
    AlgebraElement,
    Degree,
    FiniteGradedAlgebra,
    PolyDiffOp,
    op_product,
)
from .rings import Poly


def grassmann_algebra(k: int, gen_degrees: list[Degree] | None = None,
                      gen_names: list[str] | None = None) -> FiniteGradedAlgebra:
    """The exterior algebra on k generators; default grading puts each
    generator in degree (1,)."""
    if gen_degrees is None:
        gen_degrees = [(1,)] * k
    n = len(gen_degrees[0]) if k else 1
    gen_names = gen_names or [f"g{i + 1}" for i in range(k)]
    dim = 1 << k
    zero_deg = (0,) * n

    def mask_degree(mask: int) -> Degree:
        total = zero_deg
        for i in range(k):
            if mask & (1 << i):
                total = tuple(x + y for x, y in zip(total, gen_degrees[i]))
        return total

    def mask_name(mask: int) -> str:
        parts = [gen_names[i] for i in range(k) if mask & (1 << i)]
        return "^".join(parts) if parts else "1"

    def merge_sign(a: int, b: int) -> Fraction:
        inversions = 0
        bb = b
        while bb:
            low = bb & (-bb)
            inversions += bin(a & ~((low << 1) - 1)).count("1")
            bb ^= low
        return Fraction(-1 if inversions & 1 else 1)

    mult = {}
    for a in range(dim):
        for b in range(dim):
            if a & b:
                continue
            mult[(a, b)] = {a | b: merge_sign(a, b)}
    return FiniteGradedAlgebra(
        n=n,
        degrees=[mask_degree(m) for m in range(dim)],
        mult=mult,
        unit=0,
        names=[mask_name(m) for m in range(dim)],
    )


class TruncatedPolyAlgebra:
    """Q[x_1..x_v] / (x_1..x_v)^cutoff as an ungraded finite algebra, with
    the reduction map from sparse polynomials."""

    def __init__(self, nvars: int, cutoff: int):
        self.nvars = nvars
        self.cutoff = cutoff
        self.monomials: list[tuple[int, ...]] = []
        for total in range(cutoff):
            self.monomials.extend(sorted(
                e for e in iproduct(range(total + 1), repeat=nvars) if sum(e) == total))
        index = {e: i for i, e in enumerate(self.monomials)}
        mult = {}
        for i, e1 in enumerate(self.monomials):
            for j, e2 in enumerate(self.monomials):
                e = tuple(a + b for a, b in zip(e1, e2))
                if sum(e) < cutoff:
                    mult[(i, j)] = {index[e]: Fraction(1)}
        names = []
        for e in self.monomials:
            parts = [f"x{i + 1}^{p}" if p > 1 else f"x{i + 1}"
                     for i, p in enumerate(e) if p]
            names.append("*".join(parts) if parts else "1")
        self.algebra = FiniteGradedAlgebra(
            n=0, degrees=[() for _ in self.monomials], mult=mult,
            unit=0, names=names)
        self._index = index

    def reduce(self, p: Poly) -> AlgebraElement:
        if p.nvars != self.nvars:
            raise ValueError("arity mismatch")
        vec = [Fraction(0)] * len(self.monomials)
        for e, c in p.terms.items():
            if sum(e) < self.cutoff:
                vec[self._index[e]] += c
        return AlgebraElement(self.algebra, vec)

    def derivation_of_field(self, alpha: Degree, x: MultiVector) -> PolyDiffOp:
        """The genus-1 operator of an ideal-preserving vector field (all
        coefficients in the maximal ideal)."""
        alg = self.algebra
        coeffs = [x.coefficient(1 << a) for a in range(self.nvars)]
        table = {}
        for i, e in enumerate(self.monomials):
            mono = Poly(self.nvars, {e: Fraction(1)})
            img = Poly.zero(self.nvars)
            for a, c in enumerate(coeffs):
                img = img + c * mono.partial(a)
            val = self.reduce(img)
            if not val.is_zero():
                table[(i,)] = val
        return PolyDiffOp(alg, alpha, 1, (), table)

    def operator_of_multivector(self, alpha: Degree, w: MultiVector) -> PolyDiffOp:
        """Realize a multivector field as a polyderivation, mapping the wedge
        to the reversed operator product:  X ^ Y  |->  op(Y) . op(X)."""
        alg = self.algebra
        total: PolyDiffOp | None = None
        for k, part in w.graded_components().items():
            for mask, coeff in part.components.items():
                factors = [i + 1 for i in range(self.nvars) if mask & (1 << i)]
                acc = PolyDiffOp.from_element(alg, alpha, self.reduce(_poly_of(coeff)))
                for idx in factors:  # ascending: op(e_{s1}^..^e_{sk}) = D_k . .. . D_1
                    field = MultiVector.basis(w.model, idx)
                    acc = op_product(self.derivation_of_field(alpha, field), acc)
                total = acc if total is None else total + acc
        if total is None:
            return PolyDiffOp.zero(self.algebra, alpha, 0, ())
        return total


def _poly_of(c) -> Poly:
    return c if isinstance(c, Poly) else c.poly_part()


def pair_operator(trunc: "TruncatedPolyAlgebra", alpha: Degree,
                  a1: MultiVector, a2: MultiVector) -> PolyDiffOp:
    """Realize the tangent-plus-line element A1 + e_last ^ A2 as the operator

        W(A1) + I . W(A2),

    with W the reversed-wedge realization of ``operator_of_multivector``.
    The unit factor multiplies on the *left*: the orientation (like every
    other in this bridge) is the unique one under which the operator
    bracket reproduces the geometric deformed bracket on random ideal-
    preserving data, and is pinned by the three-way agreement suite."""
    identity = PolyDiffOp.identity(trunc.algebra, alpha)
    return (trunc.operator_of_multivector(alpha, a1)
            + op_product(identity, trunc.operator_of_multivector(alpha, a2)))


def z2_graded_example() -> FiniteGradedAlgebra:
    """A Z^2-graded fixture: the exterior algebra on two generators placed
    in bidegrees (1,0) and (0,1)."""
    return grassmann_algebra(2, gen_degrees=[(1, 0), (0, 1)])


class ExteriorModelBridge:
    """The exterior algebra of a rank-r bundle over a point, with transport
    of multisections and of the bracket/contraction operators."""

    def __init__(self, ja: JacobiAlgebroid, alpha: Degree = (-1,)):
        model = ja.model
        if model.base_dim != 0 or model.has_time:
            raise ValueError("the bridge needs a point base")
        self.ja = ja
        self.alpha = tuple(alpha)
        self.algebra = grassmann_algebra(
            model.fiber_rank,
            gen_degrees=[(1,)] * model.fiber_rank,
            gen_names=[f"e{i + 1}" for i in range(model.fiber_rank)],
        )
        self.model = model

    def to_element(self, x: MultiVector) -> AlgebraElement:
        vec = [Fraction(0)] * self.algebra.dim
        for mask, coeff in x.components.items():
            vec[mask] += _poly_of(coeff).constant_value()
        return AlgebraElement(self.algebra, vec)

    def from_element(self, a: AlgebraElement) -> MultiVector:
        comps = {}
        for mask, v in enumerate(a.vec):
            if v != 0:
                comps[mask] = self.model.const_coeff(v)
        return MultiVector(self.model, False, comps)

    def bracket_structure(self) -> PolyDiffOp:
        """The deformed bracket tabulated as a genus-2 operator:
        S(X, Y) = [[X, Y]]~ (the bracket has degree alpha = (-1,), so no
        extra sign is needed)."""
        table = {}
        for i in range(self.algebra.dim):
            for j in range(self.algebra.dim):
                xi = self.from_element(self.algebra.basis(i))
                yj = self.from_element(self.algebra.basis(j))
                val = self.to_element(sj_bracket(self.ja, xi, yj))
                if not val.is_zero():
                    table[(i, j)] = val
        return PolyDiffOp(self.algebra, self.alpha, 2, (-1,), table)

    def plain_bracket_structure(self) -> PolyDiffOp:
        from .algebroid import schouten
        table = {}
        for i in range(self.algebra.dim):
            for j in range(self.algebra.dim):
                xi = self.from_element(self.algebra.basis(i))
                yj = self.from_element(self.algebra.basis(j))
                val = self.to_element(schouten(self.ja.spec, xi, yj))
                if not val.is_zero():
                    table[(i, j)] = val
        return PolyDiffOp(self.algebra, self.alpha, 2, (-1,), table)

    def cocycle_contraction(self) -> PolyDiffOp:
        """i_phi as a genus-1 operator of degree (-1,)."""
        table = {}
        for i in range(self.algebra.dim):
            xi = self.from_element(self.algebra.basis(i))
            val = self.to_element(contract_cov(self.ja.phi, xi))
            if not val.is_zero():
                table[(i,)] = val
        return PolyDiffOp(self.algebra, self.alpha, 1, (-1,), table)

    def degree_operator(self) -> PolyDiffOp:
        table = {}
        for i in range(self.algebra.dim):
            xi = self.from_element(self.algebra.basis(i))
            val = self.to_element(deg_op(xi))
            if not val.is_zero():
                table[(i,)] = val
        return PolyDiffOp(self.algebra, self.alpha, 1, (0,), table)
