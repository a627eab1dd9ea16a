"""Exact scalar arithmetic: sparse rational polynomials and their exponential extension.

Two coefficient rings are provided.

``Poly``
    A sparse multivariate polynomial over the rationals.  Terms are stored
    as a dictionary mapping exponent tuples (one integer per variable) to
    ``Fraction`` coefficients; zero coefficients are never stored, so
    equality is plain dictionary equality.

``ExpPoly``
    A finite sum  sum_k  exp(k*t) * p_k(x_1, .., x_n, t)  with integer band
    indices k and ``Poly`` band coefficients.  This is the coefficient ring
    of the extended calculus on the cylinder M x R: it is closed under
    products, t-derivatives and the exponential rescalings used by the
    gauging embeddings.  Band 0 with no t-dependence embeds ``Poly``.

By convention the distinguished variable t, when present, is the *last*
variable of the underlying ``Poly`` ring.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Exponent = tuple[int, ...]
Scalar = Union[int, Fraction]


class ArityError(ValueError):
    """Raised when operands live over different variable sets."""


def _as_fraction(c: Scalar) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected an exact rational scalar, got {type(c).__name__}")


class Poly:
    """Sparse multivariate polynomial with Fraction coefficients.

    ``nvars`` fixes the arity; every exponent tuple has exactly ``nvars``
    entries.  Instances are immutable in practice: all operations return
    fresh objects and no method mutates ``terms``.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Fraction] | None = None):
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for expo, coeff in terms.items():
                if len(expo) != nvars:
                    raise ArityError(f"exponent {expo} does not have {nvars} entries")
                coeff = _as_fraction(coeff)
                if coeff != 0:
                    clean[tuple(expo)] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Poly":
        return Poly(nvars)

    @staticmethod
    def const(nvars: int, value: Scalar) -> "Poly":
        value = _as_fraction(value)
        if value == 0:
            return Poly(nvars)
        return Poly(nvars, {(0,) * nvars: value})

    @staticmethod
    def var(nvars: int, index: int) -> "Poly":
        """The coordinate polynomial for variable ``index`` (0-based)."""
        if not 0 <= index < nvars:
            raise ArityError(f"variable index {index} out of range for arity {nvars}")
        expo = [0] * nvars
        expo[index] = 1
        return Poly(nvars, {tuple(expo): Fraction(1)})

    # -- ring operations ----------------------------------------------

    def _check(self, other: "Poly") -> None:
        if not isinstance(other, Poly):
            raise TypeError(f"cannot combine Poly with {type(other).__name__}")
        if other.nvars != self.nvars:
            raise ArityError(f"arity mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for expo, coeff in other.terms.items():
            acc = out.get(expo, Fraction(0)) + coeff
            if acc == 0:
                out.pop(expo, None)
            else:
                out[expo] = acc
        result = Poly.__new__(Poly)
        result.nvars = self.nvars
        result.terms = out
        return result

    def __neg__(self) -> "Poly":
        result = Poly.__new__(Poly)
        result.nvars = self.nvars
        result.terms = {e: -c for e, c in self.terms.items()}
        return result

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                acc = out.get(expo, Fraction(0)) + c1 * c2
                if acc == 0:
                    out.pop(expo, None)
                else:
                    out[expo] = acc
        result = Poly.__new__(Poly)
        result.nvars = self.nvars
        result.terms = out
        return result

    def scale(self, c: Scalar) -> "Poly":
        c = _as_fraction(c)
        if c == 0:
            return Poly(self.nvars)
        result = Poly.__new__(Poly)
        result.nvars = self.nvars
        result.terms = {e: c * v for e, v in self.terms.items()}
        return result

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        acc = Poly.const(self.nvars, 1)
        for _ in range(n):
            acc = acc * self
        return acc

    # -- calculus -----------------------------------------------------

    def partial(self, index: int) -> "Poly":
        """Partial derivative with respect to variable ``index``."""
        if not 0 <= index < self.nvars:
            raise ArityError(f"variable index {index} out of range for arity {self.nvars}")
        out: dict[Exponent, Fraction] = {}
        for expo, coeff in self.terms.items():
            k = expo[index]
            if k == 0:
                continue
            new = list(expo)
            new[index] = k - 1
            key = tuple(new)
            acc = out.get(key, Fraction(0)) + coeff * k
            if acc == 0:
                out.pop(key, None)
            else:
                out[key] = acc
        result = Poly.__new__(Poly)
        result.nvars = self.nvars
        result.terms = out
        return result

    def substitute(self, index: int, value: "Poly | Scalar") -> "Poly":
        """Substitute ``value`` for variable ``index``.

        The result still has arity ``nvars`` (the substituted variable simply
        no longer occurs when ``value`` is free of it).
        """
        if not isinstance(value, Poly):
            value = Poly.const(self.nvars, value)
        self._check(value)
        out = Poly.zero(self.nvars)
        for expo, coeff in self.terms.items():
            rest = list(expo)
            k = rest[index]
            rest[index] = 0
            term = Poly(self.nvars, {tuple(rest): coeff})
            out = out + term * value**k
        return out

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Fraction:
        """The value of a constant polynomial (raises if non-constant)."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1:
            (expo, coeff), = self.terms.items()
            if all(e == 0 for e in expo):
                return coeff
        raise ValueError(f"polynomial {self} is not constant")

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in expo) for expo in self.terms)

    def total_degree(self) -> int:
        """Maximum total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, indices: Iterable[int]) -> int:
        """Maximum total degree in the given variables; -1 if zero."""
        idx = tuple(indices)
        if not self.terms:
            return -1
        return max(sum(e[i] for i in idx) for e in self.terms)

    def graded_parts(self, indices: Iterable[int]) -> dict[int, "Poly"]:
        """Split into parts of fixed total degree in the given variables."""
        idx = tuple(indices)
        parts: dict[int, dict[Exponent, Fraction]] = {}
        for expo, coeff in self.terms.items():
            d = sum(expo[i] for i in idx)
            parts.setdefault(d, {})[expo] = coeff
        return {d: Poly(self.nvars, t) for d, t in sorted(parts.items())}

    def homogeneous_component(self, indices: Iterable[int]) -> tuple[int, "Poly"]:
        """Lowest nonvanishing part by total degree in the given variables.

        Returns ``(k, part)`` where k is the smallest degree in the chosen
        variables carrying a nonzero term.  Undefined for the zero
        polynomial.
        """
        if self.is_zero():
            raise ValueError("homogeneous component of the zero polynomial is undefined")
        parts = self.graded_parts(indices)
        k = min(parts)
        return k, parts[k]

    # -- python protocol ------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Poly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        return render_poly(self)


def render_poly(p: Poly, var_names: list[str] | None = None) -> str:
    """Canonical string form: monomials sorted by (total degree, exponents)."""
    if not p.terms:
        return "0"
    if var_names is None:
        var_names = [f"x{i + 1}" for i in range(p.nvars)]
    chunks = []
    for expo in sorted(p.terms, key=lambda e: (sum(e), e)):
        coeff = p.terms[expo]
        factors = []
        for i, e in enumerate(expo):
            if e == 1:
                factors.append(var_names[i])
            elif e > 1:
                factors.append(f"{var_names[i]}^{e}")
        body = "*".join(factors)
        if not body:
            chunk = str(coeff)
        elif coeff == 1:
            chunk = body
        elif coeff == -1:
            chunk = f"-{body}"
        else:
            chunk = f"{coeff}*{body}"
        chunks.append(chunk)
    out = chunks[0]
    for chunk in chunks[1:]:
        out += f" - {chunk[1:]}" if chunk.startswith("-") else f" + {chunk}"
    return out


class ExpPoly:
    """Finite sum of exp(k*t) * p_k with integer k and ``Poly`` bands p_k.

    ``tvar`` is the index of the distinguished variable t inside the band
    polynomials, or ``None`` when the ring has no exponential direction (in
    which case only band 0 may be populated and the ring is just ``Poly``
    with a wrapper).
    """

    __slots__ = ("nvars", "tvar", "bands")

    def __init__(self, nvars: int, tvar: int | None, bands: Mapping[int, Poly] | None = None):
        self.nvars = nvars
        self.tvar = tvar
        clean: dict[int, Poly] = {}
        if bands:
            for k, p in bands.items():
                if p.nvars != nvars:
                    raise ArityError(f"band {k} has arity {p.nvars}, expected {nvars}")
                if tvar is None and (k != 0 or p.degree_in([]) < -1):
                    raise ArityError("nonzero bands need a distinguished t variable")
                if not p.is_zero():
                    clean[k] = p
        if tvar is None and any(k != 0 for k in clean):
            raise ArityError("nonzero bands need a distinguished t variable")
        self.bands = clean

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(nvars: int, tvar: int | None) -> "ExpPoly":
        return ExpPoly(nvars, tvar)

    @staticmethod
    def const(nvars: int, tvar: int | None, value: Scalar) -> "ExpPoly":
        return ExpPoly(nvars, tvar, {0: Poly.const(nvars, value)})

    @staticmethod
    def var(nvars: int, tvar: int | None, index: int) -> "ExpPoly":
        return ExpPoly(nvars, tvar, {0: Poly.var(nvars, index)})

    @staticmethod
    def from_poly(p: Poly, tvar: int | None = None) -> "ExpPoly":
        return ExpPoly(p.nvars, tvar, {0: p})

    @staticmethod
    def exp_band(nvars: int, tvar: int, k: int) -> "ExpPoly":
        """The pure exponential exp(k*t)."""
        return ExpPoly(nvars, tvar, {k: Poly.const(nvars, 1)})

    # -- ring operations ----------------------------------------------

    def _check(self, other: "ExpPoly") -> None:
        if not isinstance(other, ExpPoly):
            raise TypeError(f"cannot combine ExpPoly with {type(other).__name__}")
        if (other.nvars, other.tvar) != (self.nvars, self.tvar):
            raise ArityError(
                f"ring mismatch: ({self.nvars}, t={self.tvar}) vs ({other.nvars}, t={other.tvar})"
            )

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        self._check(other)
        bands = dict(self.bands)
        for k, p in other.bands.items():
            acc = bands.get(k, Poly.zero(self.nvars)) + p
            if acc.is_zero():
                bands.pop(k, None)
            else:
                bands[k] = acc
        out = ExpPoly.__new__(ExpPoly)
        out.nvars, out.tvar, out.bands = self.nvars, self.tvar, bands
        return out

    def __neg__(self) -> "ExpPoly":
        out = ExpPoly.__new__(ExpPoly)
        out.nvars, out.tvar = self.nvars, self.tvar
        out.bands = {k: -p for k, p in self.bands.items()}
        return out

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def __mul__(self, other: "ExpPoly") -> "ExpPoly":
        self._check(other)
        bands: dict[int, Poly] = {}
        for k1, p1 in self.bands.items():
            for k2, p2 in other.bands.items():
                k = k1 + k2
                acc = bands.get(k, Poly.zero(self.nvars)) + p1 * p2
                if acc.is_zero():
                    bands.pop(k, None)
                else:
                    bands[k] = acc
        out = ExpPoly.__new__(ExpPoly)
        out.nvars, out.tvar, out.bands = self.nvars, self.tvar, bands
        return out

    def scale(self, c: Scalar) -> "ExpPoly":
        c = _as_fraction(c)
        out = ExpPoly.__new__(ExpPoly)
        out.nvars, out.tvar = self.nvars, self.tvar
        out.bands = {} if c == 0 else {k: p.scale(c) for k, p in self.bands.items()}
        return out

    def band_shift(self, m: int) -> "ExpPoly":
        """Multiply by exp(m*t): shift every band index by m."""
        if m != 0 and self.tvar is None:
            raise ArityError("band shift needs a distinguished t variable")
        out = ExpPoly.__new__(ExpPoly)
        out.nvars, out.tvar = self.nvars, self.tvar
        out.bands = {k + m: p for k, p in self.bands.items()}
        return out

    # -- calculus -----------------------------------------------------

    def partial(self, index: int) -> "ExpPoly":
        """Partial derivative; the t-direction also differentiates the bands:
        d/dt (exp(k t) q) = exp(k t) (k q + dq/dt)."""
        bands: dict[int, Poly] = {}
        for k, p in self.bands.items():
            q = p.partial(index)
            if index == self.tvar:
                q = q + p.scale(k)
            if not q.is_zero():
                bands[k] = q
        out = ExpPoly.__new__(ExpPoly)
        out.nvars, out.tvar, out.bands = self.nvars, self.tvar, bands
        return out

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.bands

    def band(self, k: int) -> Poly:
        return self.bands.get(k, Poly.zero(self.nvars))

    def poly_part(self) -> Poly:
        """The underlying polynomial when the element is band-0 only."""
        if any(k != 0 for k in self.bands):
            raise ValueError("element has nonzero exponential bands")
        return self.band(0)

    def is_time_independent(self) -> bool:
        """True when the element is band 0 with no polynomial t-dependence."""
        if set(self.bands) - {0}:
            return False
        if self.tvar is None:
            return True
        p = self.band(0)
        return all(e[self.tvar] == 0 for e in p.terms)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ExpPoly)
            and (self.nvars, self.tvar) == (other.nvars, other.tvar)
            and self.bands == other.bands
        )

    def __hash__(self) -> int:
        return hash((self.nvars, self.tvar, frozenset((k, hash(p)) for k, p in self.bands.items())))

    def __repr__(self) -> str:
        return f"ExpPoly({self})"

    def __str__(self) -> str:
        return render_exppoly(self)


def render_exppoly(p: ExpPoly, var_names: list[str] | None = None) -> str:
    if not p.bands:
        return "0"
    if var_names is None:
        var_names = [f"x{i + 1}" for i in range(p.nvars)]
        if p.tvar is not None:
            var_names[p.tvar] = "t"
    chunks = []
    for k in sorted(p.bands):
        body = render_poly(p.bands[k], var_names)
        if k == 0:
            chunks.append(body)
        else:
            exp = "e^{t}" if k == 1 else ("e^{-t}" if k == -1 else f"e^{{{k} t}}")
            chunks.append(exp if body == "1" else f"{exp}*({body})")
    return " + ".join(chunks)
