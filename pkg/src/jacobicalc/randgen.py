"""Seeded random data for the verification suites.

Everything is driven by a caller-supplied ``random.Random`` so that every
campaign is reproducible from its seed.  Coefficients are small-degree
polynomials with small integer coefficients: large enough to falsify any
wrong sign, small enough to keep exact arithmetic fast.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from .exterior import BundleModel, Coeff, MultiVector
from .rings import ExpPoly, Poly


def rand_poly(rng: random.Random, nvars: int, max_degree: int = 2,
              terms: int = 2, bound: int = 3) -> Poly:
    out = Poly.zero(nvars)
    for _ in range(terms):
        expo = [0] * nvars
        for _ in range(rng.randint(0, max_degree)):
            if nvars == 0:
                break
            expo[rng.randrange(nvars)] += 1
        c = rng.randint(-bound, bound)
        out = out + Poly(nvars, {tuple(expo): Fraction(c)})
    return out


def rand_coeff(rng: random.Random, model: BundleModel, max_degree: int = 2,
               terms: int = 2, bound: int = 3) -> Coeff:
    p = rand_poly(rng, model.nvars, max_degree, terms, bound)
    if model.has_time:
        return ExpPoly.from_poly(p, model.tvar)
    return p


def rand_multivector(rng: random.Random, model: BundleModel, degree: int,
                     dual: bool = False, max_degree: int = 2, terms: int = 2,
                     bound: int = 3, n_components: int = 2) -> MultiVector:
    """A random homogeneous element of the given Grassmann degree."""
    masks = [sum(1 << (i - 1) for i in combo)
             for combo in combinations(range(1, model.fiber_rank + 1), degree)]
    out = MultiVector.zero(model, dual)
    for _ in range(min(n_components, len(masks))):
        mask = rng.choice(masks)
        comp = MultiVector(model, dual,
                           {mask: rand_coeff(rng, model, max_degree, terms, bound)})
        out = out + comp
    return out


def rand_degree(rng: random.Random, model: BundleModel, max_deg: int | None = None) -> int:
    top = model.fiber_rank if max_deg is None else min(max_deg, model.fiber_rank)
    return rng.randint(0, top)
