"""First-order polydifferential operator calculus on finite graded
commutative algebras.

An operator of genus i is a graded-symmetric i-slot map, first-order in
each slot, stored extensionally as its value table on basis tuples; a
fixed shift alpha in Z^n drives every sign through the standard pairing
<.,.> on Z^n.  Genus 0 is the algebra itself; the identity operator I has
genus 1.  The product and bracket are defined by the recursions

    (A.B)(a)   = (-1)^{<a+alpha, B+j alpha> + j} A(a).B + A.B(a),
    [[A,B]](a) = (-1)^{<a-alpha, B+(j-1) alpha> + j-1} [[A(a),B]] + [[A,B(a)]],

seeded by [[D,a]] = D(a), [[a,D]] = (-1)^{<a-alpha, D+(i-1)alpha> + i} D(a)
and [[a,b]] = 0.  Everything an operator claims (symmetry, first-order
law, bracket laws, decompositions) is checked by exhaustive evaluation;
the algebras are finite by construction, so the checks are complete.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from . import linalg

Degree = tuple[int, ...]


def _dot(u: Degree, v: Degree) -> int:
    return sum(x * y for x, y in zip(u, v))


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


def _vadd(u: Degree, v: Degree) -> Degree:
    return tuple(x + y for x, y in zip(u, v))


def _vmul(k: int, u: Degree) -> Degree:
    return tuple(k * x for x in u)


def _degsum(alg: "FiniteGradedAlgebra", tup: tuple[int, ...]) -> Degree:
    total = (0,) * alg.n
    for i in tup:
        total = _vadd(total, alg.degrees[i])
    return total


class FiniteGradedAlgebra:
    """A Z^n-graded associative commutative algebra with unit, given by a
    basis with degrees and structure constants.  Graded commutativity,
    associativity, unitality and degree additivity are checked exhaustively
    at construction."""

    def __init__(self, n: int, degrees: list[Degree],
                 mult: dict[tuple[int, int], dict[int, Fraction]],
                 unit: int, names: list[str] | None = None):
        self.n = n
        self.dim = len(degrees)
        self.degrees = [tuple(d) for d in degrees]
        if any(len(d) != n for d in self.degrees):
            raise ValueError("every degree vector must have length n")
        self.unit = unit
        self.names = names or [f"b{i}" for i in range(self.dim)]
        table = {}
        for (i, j), col in mult.items():
            col = {k: Fraction(v) for k, v in col.items() if v != 0}
            if col:
                table[(i, j)] = col
        self.mult = table
        self._check()

    def _check(self) -> None:
        basis = [self.basis(i) for i in range(self.dim)]
        one = basis[self.unit]
        if self.degrees[self.unit] != (0,) * self.n:
            raise ValueError("the unit must have degree zero")
        for i in range(self.dim):
            if basis[i] * one != basis[i] or one * basis[i] != basis[i]:
                raise ValueError(f"unit fails on basis element {self.names[i]}")
        for i in range(self.dim):
            for j in range(self.dim):
                ij = basis[i] * basis[j]
                sign = _sgn(_dot(self.degrees[i], self.degrees[j]))
                if ij != (basis[j] * basis[i]).scale(sign):
                    raise ValueError(f"graded commutativity fails on ({i},{j})")
                want = _vadd(self.degrees[i], self.degrees[j])
                for k, v in enumerate(ij.vec):
                    if v != 0 and self.degrees[k] != want:
                        raise ValueError(f"product of ({i},{j}) is not degree-additive")
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    if (basis[i] * basis[j]) * basis[k] != basis[i] * (basis[j] * basis[k]):
                        raise ValueError(f"associativity fails on ({i},{j},{k})")

    def basis(self, i: int) -> "AlgebraElement":
        vec = [Fraction(0)] * self.dim
        vec[i] = Fraction(1)
        return AlgebraElement(self, vec)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, [Fraction(0)] * self.dim)

    def one(self) -> "AlgebraElement":
        return self.basis(self.unit)

    def indices_of_degree(self, d: Degree) -> list[int]:
        return [i for i, deg in enumerate(self.degrees) if deg == d]

    def __repr__(self) -> str:
        return f"FiniteGradedAlgebra(dim {self.dim}, Z^{self.n}-graded)"


class AlgebraElement:
    __slots__ = ("alg", "vec")

    def __init__(self, alg: FiniteGradedAlgebra, vec: list[Fraction]):
        self.alg = alg
        self.vec = [Fraction(v) for v in vec]

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.alg, [a + b for a, b in zip(self.vec, other.vec)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.alg, [a - b for a, b in zip(self.vec, other.vec)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.alg, [-a for a in self.vec])

    def scale(self, c) -> "AlgebraElement":
        c = Fraction(c)
        return AlgebraElement(self.alg, [c * a for a in self.vec])

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = [Fraction(0)] * self.alg.dim
        for i, a in enumerate(self.vec):
            if a == 0:
                continue
            for j, b in enumerate(other.vec):
                if b == 0:
                    continue
                for k, c in self.alg.mult.get((i, j), {}).items():
                    out[k] += a * b * c
        return AlgebraElement(self.alg, out)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.vec)

    def degree_components(self) -> dict[Degree, "AlgebraElement"]:
        parts: dict[Degree, list[Fraction]] = {}
        for i, v in enumerate(self.vec):
            if v != 0:
                part = parts.setdefault(self.alg.degrees[i],
                                        [Fraction(0)] * self.alg.dim)
                part[i] = v
        return {d: AlgebraElement(self.alg, vec) for d, vec in parts.items()}

    def uniform_degree(self) -> Degree:
        parts = self.degree_components()
        if len(parts) > 1:
            raise ValueError("element is not of uniform degree")
        return next(iter(parts)) if parts else (0,) * self.alg.n

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, AlgebraElement)
                and self.alg is other.alg and self.vec == other.vec)

    def __hash__(self) -> int:
        return hash((id(self.alg), tuple(self.vec)))

    def __repr__(self) -> str:
        chunks = [f"{v}*{self.alg.names[i]}" for i, v in enumerate(self.vec) if v != 0]
        return " + ".join(chunks) if chunks else "0"


class PolyDiffOp:
    """A uniform-degree genus-i operator, stored as a value table on basis
    tuples (genus 0 holds a single value at the empty tuple)."""

    __slots__ = ("alg", "alpha", "genus", "degree", "table", "_subcache")

    def __init__(self, alg: FiniteGradedAlgebra, alpha: Degree, genus: int,
                 degree: Degree, table: dict[tuple[int, ...], AlgebraElement]):
        self.alg = alg
        self.alpha = tuple(alpha)
        self.genus = genus
        self.degree = tuple(degree)
        clean = {}
        for tup, val in table.items():
            if len(tup) != genus:
                raise ValueError(f"tuple {tup} does not have genus {genus} length")
            if not val.is_zero():
                clean[tuple(tup)] = val
        self.table = clean
        self._subcache: dict[int, "PolyDiffOp"] = {}

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(alg: FiniteGradedAlgebra, alpha: Degree, genus: int,
             degree: Degree | None = None) -> "PolyDiffOp":
        return PolyDiffOp(alg, alpha, genus, degree or (0,) * alg.n, {})

    @staticmethod
    def from_element(alg: FiniteGradedAlgebra, alpha: Degree,
                     elem: AlgebraElement) -> "PolyDiffOp":
        return PolyDiffOp(alg, alpha, 0, elem.uniform_degree(), {(): elem})

    @staticmethod
    def identity(alg: FiniteGradedAlgebra, alpha: Degree) -> "PolyDiffOp":
        table = {(i,): alg.basis(i) for i in range(alg.dim)}
        return PolyDiffOp(alg, alpha, 1, (0,) * alg.n, table)

    # -- basic structure ---------------------------------------------------

    def value(self, tup: tuple[int, ...]) -> AlgebraElement:
        return self.table.get(tuple(tup), self.alg.zero())

    def scalar(self) -> AlgebraElement:
        if self.genus != 0:
            raise ValueError("not a genus-0 operator")
        return self.value(())

    def apply_basis(self, i: int) -> "PolyDiffOp":
        """Partial application to a basis element (genus drops by one)."""
        cached = self._subcache.get(i)
        if cached is not None:
            return cached
        table = {}
        for tup, val in self.table.items():
            if tup[0] == i:
                table[tup[1:]] = val
        out = PolyDiffOp(self.alg, self.alpha, self.genus - 1,
                         _vadd(self.degree, self.alg.degrees[i]), table)
        self._subcache[i] = out
        return out

    def apply(self, elem: AlgebraElement) -> "PolyDiffOp":
        """Partial application to a uniform-degree element."""
        deg = elem.uniform_degree()
        out = PolyDiffOp.zero(self.alg, self.alpha, self.genus - 1,
                              _vadd(self.degree, deg))
        for i, c in enumerate(elem.vec):
            if c != 0:
                out = out + self.apply_basis(i).scale(c)
        return out

    def __add__(self, other: "PolyDiffOp") -> "PolyDiffOp":
        # the zero operator is shared across genera: absorb it
        if not other.table:
            return self
        if not self.table:
            return other
        if (self.genus, self.alpha) != (other.genus, other.alpha):
            raise ValueError("operator shapes differ")
        if self.degree != other.degree:
            raise ValueError("cannot add operators of different degrees")
        table = dict(self.table)
        for tup, val in other.table.items():
            acc = table.get(tup)
            table[tup] = val if acc is None else acc + val
        return PolyDiffOp(self.alg, self.alpha, self.genus, self.degree, table)

    def __sub__(self, other: "PolyDiffOp") -> "PolyDiffOp":
        return self + other.scale(-1)

    def scale(self, c) -> "PolyDiffOp":
        return PolyDiffOp(self.alg, self.alpha, self.genus, self.degree,
                          {t: v.scale(c) for t, v in self.table.items()})

    def is_zero(self) -> bool:
        return not self.table

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyDiffOp):
            return NotImplemented
        if self.alg is not other.alg or self.alpha != other.alpha:
            return False
        if not self.table and not other.table:
            return True
        if self.genus != other.genus or self.degree != other.degree:
            return False
        return self.table == other.table

    def __hash__(self) -> int:
        return hash((id(self.alg), self.alpha, self.genus,
                     frozenset(self.table.items())))

    def __repr__(self) -> str:
        return (f"PolyDiffOp(genus {self.genus}, degree {self.degree}, "
                f"{len(self.table)} entries)")


def _all_tuples(alg: FiniteGradedAlgebra, genus: int):
    return iproduct(range(alg.dim), repeat=genus)


# -- product and bracket -------------------------------------------------------


def op_product(a: PolyDiffOp, b: PolyDiffOp) -> PolyDiffOp:
    """The graded commutative product extending the algebra product."""
    return _op_product(a, b, {})


def _op_product(a: PolyDiffOp, b: PolyDiffOp, memo: dict) -> PolyDiffOp:
    key = (id(a), id(b))
    hit = memo.get(key)
    if hit is not None:
        return hit[0]
    alg, alpha = a.alg, a.alpha
    if a.genus == 0 and b.genus == 0:
        out = PolyDiffOp.from_element(alg, alpha, a.scalar() * b.scalar())
    else:
        genus = a.genus + b.genus
        degree = _vadd(a.degree, b.degree)
        table: dict[tuple[int, ...], AlgebraElement] = {}
        for head in range(alg.dim):
            if a.genus > 0:
                sign = _sgn(_dot(_vadd(alg.degrees[head], alpha),
                                 _vadd(b.degree, _vmul(b.genus, alpha))) + b.genus)
                sub = _op_product(a.apply_basis(head), b, memo)
                for rest, val in sub.table.items():
                    v = val.scale(sign)
                    tup = (head,) + rest
                    acc = table.get(tup)
                    table[tup] = v if acc is None else acc + v
            if b.genus > 0:
                sub = _op_product(a, b.apply_basis(head), memo)
                for rest, val in sub.table.items():
                    tup = (head,) + rest
                    acc = table.get(tup)
                    table[tup] = val if acc is None else acc + val
        table = {t: v for t, v in table.items() if not v.is_zero()}
        out = PolyDiffOp(alg, alpha, genus, degree, table)
    memo[key] = (out, a, b)
    return out


def sj_opbracket(a: PolyDiffOp, b: PolyDiffOp) -> PolyDiffOp:
    """The graded Jacobi bracket on operators, seeded by evaluation."""
    return _sj_opbracket(a, b, {})


def _sj_opbracket(a: PolyDiffOp, b: PolyDiffOp, memo: dict) -> PolyDiffOp:
    key = (id(a), id(b))
    hit = memo.get(key)
    if hit is not None:
        return hit[0]
    alg, alpha = a.alg, a.alpha
    degree = _vadd(a.degree, b.degree)
    if a.genus == 0 and b.genus == 0:
        out = PolyDiffOp.zero(alg, alpha, 0, degree)
    elif b.genus == 0:
        out = a.apply(b.scalar())
    elif a.genus == 0:
        sign = _sgn(_dot(_vadd(a.degree, _vmul(-1, alpha)),
                         _vadd(b.degree, _vmul(b.genus - 1, alpha))) + b.genus)
        out = b.apply(a.scalar()).scale(sign)
    else:
        genus = a.genus + b.genus - 1
        table: dict[tuple[int, ...], AlgebraElement] = {}
        for head in range(alg.dim):
            sign = _sgn(_dot(_vadd(alg.degrees[head], _vmul(-1, alpha)),
                             _vadd(b.degree, _vmul(b.genus - 1, alpha))) + b.genus - 1)
            sub = _sj_opbracket(a.apply_basis(head), b, memo)
            for rest, val in sub.table.items():
                v = val.scale(sign)
                tup = (head,) + rest
                acc = table.get(tup)
                table[tup] = v if acc is None else acc + v
            sub = _sj_opbracket(a, b.apply_basis(head), memo)
            for rest, val in sub.table.items():
                tup = (head,) + rest
                acc = table.get(tup)
                table[tup] = val if acc is None else acc + val
        table = {t: v for t, v in table.items() if not v.is_zero()}
        out = PolyDiffOp(alg, alpha, genus, degree, table)
    memo[key] = (out, a, b)
    return out


# -- validation ---------------------------------------------------------------


def validate_op(d: PolyDiffOp) -> tuple[bool, str | None]:
    """Exhaustively check graded symmetry on adjacent slots, the first-order
    law in the first slot against all basis pairs, and degree consistency.
    Returns (ok, first witness)."""
    alg, alpha = d.alg, d.alpha
    for tup, val in d.table.items():
        want = _vadd(d.degree, _degsum(alg, tup))
        for k, v in enumerate(val.vec):
            if v != 0 and alg.degrees[k] != want:
                return False, f"value at {tup} is not of degree {want}"
    for tup in _all_tuples(alg, d.genus):
        for p in range(d.genus - 1):
            swapped = tup[:p] + (tup[p + 1], tup[p]) + tup[p + 2:]
            sign = _sgn(_dot(_vadd(alg.degrees[tup[p]], alpha),
                             _vadd(alg.degrees[tup[p + 1]], alpha)))
            if d.value(tup) != d.value(swapped).scale(-sign):
                return False, f"graded symmetry fails at {tup} slot {p}"
    if d.genus >= 1:
        one = alg.one()
        d_one = d.apply(one)
        for i in range(alg.dim):
            for j in range(alg.dim):
                a, b = alg.basis(i), alg.basis(j)
                lhs = d.apply(a * b) if not (a * b).is_zero() else \
                    PolyDiffOp.zero(alg, alpha, d.genus - 1)
                sign = _sgn(_dot(alg.degrees[i],
                                 _vadd(d.degree, _vmul(d.genus - 1, alpha))))
                rhs = op_product(d.apply(a), PolyDiffOp.from_element(alg, alpha, b))
                rhs = rhs + op_product(PolyDiffOp.from_element(alg, alpha, a),
                                       d.apply(b)).scale(sign)
                if not (a * b).is_zero():
                    rhs = rhs - op_product(d_one, PolyDiffOp.from_element(alg, alpha, a * b))
                if lhs != rhs:
                    return False, f"first-order law fails on ({alg.names[i]}, {alg.names[j]})"
    return True, None


def is_polyderivation(d: PolyDiffOp) -> bool:
    return d.genus == 0 or d.apply(d.alg.one()).is_zero()


# -- decomposition ---------------------------------------------------------------


def _unit_power_value(d: PolyDiffOp, m: int) -> PolyDiffOp:
    out = d
    one = d.alg.one()
    for _ in range(m):
        out = out.apply(one)
    return out


def op_power(a: PolyDiffOp, k: int) -> PolyDiffOp:
    out = PolyDiffOp.from_element(a.alg, a.alpha, a.alg.one())
    for _ in range(k):
        out = op_product(out, a)
    return out


def decompose(d: PolyDiffOp) -> list[PolyDiffOp]:
    """Split D of genus i into polyderivation components C_0 .. C_i with

        D = sum_l (1/l!) C_l . I^l,
        C_l = sum_{k=0}^{i-l} (-1)^k D(1,..,1)_{(k+l) times} . I^k / k!,

    C_l of genus i - l.  Each C_l kills the unit; the round trip is exact
    (both are pinned suites)."""
    alg, alpha = d.alg, d.alpha
    identity = PolyDiffOp.identity(alg, alpha)
    out = []
    for l in range(d.genus + 1):
        comp = PolyDiffOp.zero(alg, alpha, d.genus - l,
                               _vadd(d.degree, _vmul(l, alpha)))
        fact = Fraction(1)
        for k in range(d.genus - l + 1):
            if k > 0:
                fact *= k
            term = op_product(_unit_power_value(d, k + l), op_power(identity, k))
            comp = comp + term.scale(_sgn(k) * Fraction(1, 1) / fact)
        out.append(comp)
    return out


def recompose(components: list[PolyDiffOp]) -> PolyDiffOp:
    alg, alpha = components[0].alg, components[0].alpha
    identity = PolyDiffOp.identity(alg, alpha)
    total = None
    fact = Fraction(1)
    for l, comp in enumerate(components):
        if l > 0:
            fact *= l
        term = op_product(comp, op_power(identity, l)).scale(Fraction(1) / fact)
        total = term if total is None else total + term
    return total


# -- supercanonical structures and induced brackets ----------------------------------


def is_supercanonical(s: PolyDiffOp) -> bool:
    """Genus 2, valid, even self-pairing of degree + alpha, and [[S, S]] = 0."""
    if s.genus != 2:
        return False
    ok, _ = validate_op(s)
    if not ok:
        return False
    shifted = _vadd(s.degree, s.alpha)
    if _dot(shifted, shifted) % 2 != 0:
        return False
    return sj_opbracket(s, s).is_zero()


def induced_bracket(s: PolyDiffOp, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """{a, b}_S = (-1)^{<a+alpha, S+alpha>} S(a, b), per uniform part of a."""
    out = s.alg.zero()
    for deg, part in a.degree_components().items():
        sign = _sgn(_dot(_vadd(deg, s.alpha), _vadd(s.degree, s.alpha)))
        out = out + s.apply(part).apply(b).scalar().scale(sign)
    return out


def op_from_bracket(alg: FiniteGradedAlgebra, alpha: Degree, degree: Degree,
                    bracket) -> PolyDiffOp:
    """Tabulate a bilinear bracket of known degree as a genus-2 operator
    with S(a, b) = (-1)^{<a+alpha, degree+alpha>} {a, b}."""
    table = {}
    for i in range(alg.dim):
        for j in range(alg.dim):
            sign = _sgn(_dot(_vadd(alg.degrees[i], alpha), _vadd(degree, alpha)))
            val = bracket(alg.basis(i), alg.basis(j)).scale(sign)
            if not val.is_zero():
                table[(i, j)] = val
    return PolyDiffOp(alg, alpha, 2, degree, table)


def jacobi_axioms_hold(alg: FiniteGradedAlgebra, bracket, degree: Degree) -> bool:
    """Exhaustive check of graded anticommutativity, the generalized Leibniz
    rule and the graded Jacobi identity for a bracket of the given degree."""
    k = tuple(degree)
    basis = [alg.basis(i) for i in range(alg.dim)]
    degs = alg.degrees
    one = alg.one()
    for i in range(alg.dim):
        for j in range(alg.dim):
            sign = _sgn(_dot(_vadd(degs[i], k), _vadd(degs[j], k)))
            if bracket(basis[i], basis[j]) != bracket(basis[j], basis[i]).scale(-sign):
                return False
    for i in range(alg.dim):
        for j in range(alg.dim):
            for m in range(alg.dim):
                sign = _sgn(_dot(_vadd(degs[i], k), degs[j]))
                lhs = bracket(basis[i], basis[j] * basis[m])
                rhs = (bracket(basis[i], basis[j]) * basis[m]
                       + (basis[j] * bracket(basis[i], basis[m])).scale(sign)
                       - bracket(basis[i], one) * basis[j] * basis[m])
                if lhs != rhs:
                    return False
                sign = _sgn(_dot(_vadd(degs[i], k), _vadd(degs[j], k)))
                jac_l = bracket(bracket(basis[i], basis[j]), basis[m])
                jac_r = (bracket(basis[i], bracket(basis[j], basis[m]))
                         - bracket(basis[j], bracket(basis[i], basis[m])).scale(sign))
                if jac_l != jac_r:
                    return False
    return True


# -- cohomology operators ----------------------------------------------------------


def cohomology_operator(s: PolyDiffOp, t: Fraction | int):
    """The weighted coboundary A |-> [[S, A]] + t S(1).A of a supercanonical
    structure of degree alpha; squares to zero for every t."""
    s_one = s.apply(s.alg.one())
    t = Fraction(t)

    def op(a: PolyDiffOp) -> PolyDiffOp:
        out = sj_opbracket(s, a)
        if t != 0:
            out = out + op_product(s_one, a).scale(t)
        return out

    return op


def operator_space_basis(alg: FiniteGradedAlgebra, alpha: Degree, genus: int,
                         degree: Degree) -> list[PolyDiffOp]:
    """Basis of the space of genus-i operators of the given uniform degree,
    by exact elimination on the symmetry + first-order constraints."""
    if genus == 0:
        return [PolyDiffOp.from_element(alg, alpha, alg.basis(i))
                for i in alg.indices_of_degree(degree)]
    unknowns: list[tuple[tuple[int, ...], int]] = []
    for tup in _all_tuples(alg, genus):
        want = _vadd(degree, _degsum(alg, tup))
        for b in alg.indices_of_degree(want):
            unknowns.append((tup, b))
    if not unknowns:
        return []

    def unit_op(idx: int) -> PolyDiffOp:
        tup, b = unknowns[idx]
        return PolyDiffOp(alg, alpha, genus, degree, {tup: alg.basis(b)})

    rows: list[list[Fraction]] = []

    def residual_rows(op_residuals):
        # op_residuals: list over unknowns of (tuple -> AlgebraElement)
        keys = sorted({(t, c) for res in op_residuals for t, v in res.items()
                       for c, x in enumerate(v.vec) if x != 0})
        for (t, c) in keys:
            rows.append([res.get(t, alg.zero()).vec[c] if t in res else Fraction(0)
                         for res in op_residuals])

    # symmetry constraints
    sym_res = []
    for idx in range(len(unknowns)):
        d = unit_op(idx)
        res = {}
        for tup in _all_tuples(alg, genus):
            for p in range(genus - 1):
                swapped = tup[:p] + (tup[p + 1], tup[p]) + tup[p + 2:]
                sign = _sgn(_dot(_vadd(alg.degrees[tup[p]], alpha),
                                 _vadd(alg.degrees[tup[p + 1]], alpha)))
                val = d.value(tup) + d.value(swapped).scale(sign)
                if not val.is_zero():
                    res[(tup, p)] = val
        sym_res.append(res)
    residual_rows(sym_res)

    # first-order constraints in the first slot
    fo_res = []
    for idx in range(len(unknowns)):
        d = unit_op(idx)
        d_one = d.apply(alg.one())
        res = {}
        for i in range(alg.dim):
            for j in range(alg.dim):
                a, b = alg.basis(i), alg.basis(j)
                ab = a * b
                lhs = d.apply(ab) if not ab.is_zero() else \
                    PolyDiffOp.zero(alg, alpha, genus - 1)
                sign = _sgn(_dot(alg.degrees[i], _vadd(degree, _vmul(genus - 1, alpha))))
                rhs = op_product(d.apply(a), PolyDiffOp.from_element(alg, alpha, b))
                rhs = rhs + op_product(PolyDiffOp.from_element(alg, alpha, a),
                                       d.apply(b)).scale(sign)
                if not ab.is_zero():
                    rhs = rhs - op_product(d_one, PolyDiffOp.from_element(alg, alpha, ab))
                diff = lhs - rhs
                for tup, val in diff.table.items():
                    res[((i, j), tup)] = val
        fo_res.append(res)
    # reuse residual_rows pattern with distinct key space
    keys = sorted({(t, c) for res in fo_res for t, v in res.items()
                   for c, x in enumerate(v.vec) if x != 0})
    for (t, c) in keys:
        rows.append([res[t].vec[c] if t in res else Fraction(0) for res in fo_res])

    if not rows:
        coeffs = [[Fraction(1) if i == j else Fraction(0)
                   for j in range(len(unknowns))] for i in range(len(unknowns))]
    else:
        coeffs = linalg.nullspace(rows)
    out = []
    for vec in coeffs:
        table: dict[tuple[int, ...], AlgebraElement] = {}
        for (tup, b), v in zip(unknowns, vec):
            if v != 0:
                acc = table.get(tup, alg.zero())
                table[tup] = acc + alg.basis(b).scale(v)
        out.append(PolyDiffOp(alg, alpha, genus, degree, table))
    return out


def operator_degrees(alg: FiniteGradedAlgebra, genus: int) -> list[Degree]:
    """All uniform degrees a genus-i operator on this algebra can have."""
    degs = set()
    for tup in _all_tuples(alg, genus):
        total = _degsum(alg, tup)
        for b in range(alg.dim):
            degs.add(tuple(x - y for x, y in zip(alg.degrees[b], total)))
    return sorted(degs)


@dataclass
class CohomologyRanks:
    """Per-(genus, degree) dimensions for the weighted coboundary."""

    blocks: dict[tuple[int, Degree], dict[str, int]]


def cohomology_ranks(s: PolyDiffOp, t, max_genus: int = 2) -> CohomologyRanks:
    """Exact kernel/image/homology dimensions of the weighted coboundary on
    the finite operator spaces, per genus and degree block."""
    alg, alpha = s.alg, s.alpha
    op = cohomology_operator(s, t)
    bases: dict[tuple[int, Degree], list[PolyDiffOp]] = {}
    for i in range(max_genus + 2):
        for deg in operator_degrees(alg, i):
            b = operator_space_basis(alg, alpha, i, deg)
            if b:
                bases[(i, deg)] = b

    def matrix_of(i: int, deg: Degree):
        src = bases.get((i, deg), [])
        dst = bases.get((i + 1, _vadd(deg, s.degree)), [])
        if not src:
            return None, src, dst
        rows = []
        for a in src:
            img = op(a)
            rows.append(_coords_in_basis(img, dst))
        return [[rows[j][k] for j in range(len(src))] for k in range(len(dst))], src, dst

    blocks = {}
    for i in range(max_genus + 1):
        for deg in operator_degrees(alg, i):
            mat, src, dst = matrix_of(i, deg)
            if not src:
                continue
            rank_out = linalg.rank(mat) if mat and dst else 0
            prev_deg = tuple(x - y for x, y in zip(deg, s.degree))
            mat_in, src_in, _ = matrix_of(i - 1, prev_deg) if i >= 1 else (None, [], [])
            rank_in = 0
            if src_in:
                mat_in2, _, dst_in = matrix_of(i - 1, prev_deg)
                rank_in = linalg.rank(mat_in2) if mat_in2 and dst_in else 0
            dim = len(src)
            blocks[(i, deg)] = {
                "dim": dim,
                "rank_out": rank_out,
                "rank_in": rank_in,
                "homology": dim - rank_out - rank_in,
            }
    return CohomologyRanks(blocks)


def _coords_in_basis(x: PolyDiffOp, basis: list[PolyDiffOp]) -> list[Fraction]:
    if not basis:
        if not x.is_zero():
            raise ValueError("element does not lie in the expected block")
        return []
    keys = sorted({(t, c) for b in basis for t, v in b.table.items()
                   for c in range(len(v.vec))} |
                  {(t, c) for t, v in x.table.items() for c in range(len(v.vec))})
    mat = [[b.value(t).vec[c] for b in basis] for (t, c) in keys]
    rhs = [x.value(t).vec[c] for (t, c) in keys]
    sol = linalg.solve(mat, rhs)
    if sol is None:
        raise ValueError("element does not lie in the span of the block basis")
    return sol


def bracket_with_i_powers(a: PolyDiffOp, b: PolyDiffOp, n: int, m: int,
                          ) -> tuple[PolyDiffOp, PolyDiffOp]:
    """Both sides of the odd-shift reduction formula

        [[A.I^n, B.I^m]] = (-1)^{<(n-1)a, B>} (m x - n y) A.B.I^{n+m-1}
                         + (-1)^{<n a, B>} [[A, B]].I^{n+m},

    where x = genus(A) - 1 and y = genus(B) - 1 are the shifted genera
    (Lie degrees); requires <alpha, alpha> odd.  The coefficient reading
    is pinned empirically: it is the unique one under which the identity
    holds on polyderivation probes of every genus."""
    alpha = a.alpha
    if _dot(alpha, alpha) % 2 == 0:
        raise ValueError("the reduction formula needs an odd shift")
    identity = PolyDiffOp.identity(a.alg, alpha)
    lhs = sj_opbracket(op_product(a, op_power(identity, n)),
                       op_product(b, op_power(identity, m)))
    coeff = m * (a.genus - 1) - n * (b.genus - 1)
    rhs = sj_opbracket(a, b)
    rhs = op_product(rhs, op_power(identity, n + m)).scale(
        _sgn(_dot(_vmul(n, alpha), b.degree)))
    if coeff != 0 and n + m >= 1:
        first = op_product(op_product(a, b), op_power(identity, n + m - 1))
        rhs = rhs + first.scale(coeff * _sgn(_dot(_vmul(n - 1, alpha), b.degree)))
    return lhs, rhs
