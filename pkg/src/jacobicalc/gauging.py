"""The extended algebroid over the cylinder and the exponential embeddings.

Given a Jacobi algebroid (E, phi) over R^n, the extended algebroid lives on
the same fiber over R^n x R: time-independent sections keep their brackets,
and the anchor gains a t-component weighted by the cocycle,

    rho^(X) = rho(X) + <phi, X> d/dt,

which makes t a potential for phi: d t = phi upstairs.  The three
embeddings

    U(X)        plain inclusion (time-independent),
    tilde_u(X)  = exp(-(|X|-1) t) U(X),
    hat_u(mu,a) = exp((|mu|+a) t) U(mu),

transport the deformed calculus downstairs to the plain calculus upstairs;
the transport identities are what the gauging suites verify.
"""

from __future__ import annotations

from .algebroid import AlgebroidSpec, InvalidSpec, ext_derivative, lie_derivative, schouten
from .exterior import BundleModel, ModelMismatch, MultiVector, interior, wedge
from .jacobi import JacobiAlgebroid, jacobi_lie, sj_bracket
from .rings import ExpPoly, Poly


class ExtendedAlgebroid:
    """The cylinder extension of a Jacobi algebroid, with its embeddings."""

    def __init__(self, ja: JacobiAlgebroid):
        base = ja.spec
        if base.model.has_time:
            raise ModelMismatch("base algebroid already lives on a cylinder")
        if base.sections_dual:
            raise ModelMismatch("extension is implemented for section-side algebroids")
        self.base = ja
        model = BundleModel(base.model.base_dim, base.model.fiber_rank, has_time=True)
        self.model = model

        def lift(c: Poly) -> ExpPoly:
            return model.embed_coeff(c)

        anchor = []
        for i in range(1, base.model.fiber_rank + 1):
            row = [lift(c) for c in base.anchor_row(i)]
            row.append(lift(ja.phi.coefficient(1 << (i - 1))))
            anchor.append(row)
        structure = {
            key: {k: lift(c) for k, c in col.items()}
            for key, col in base.structure.items()
        }
        self.spec = AlgebroidSpec(model, anchor, structure)
        report = self.spec.check()
        if not report.ok:
            raise InvalidSpec(
                "extended algebroid fails the axioms (broken cocycle?): "
                + "; ".join(report.failures))
        # d t = phi upstairs, by construction of the anchor
        t_fn = MultiVector.function(model, model.coordinate(model.base_dim), dual=True)
        if ext_derivative(self.spec, t_fn) != self.embed_u(ja.phi):
            raise InvalidSpec("extended differential does not make t a potential for phi")

    # -- embeddings -----------------------------------------------------

    def embed_u(self, x: MultiVector) -> MultiVector:
        """Plain inclusion as a time-independent element."""
        comps = {m: self.model.embed_coeff(c) for m, c in x.components.items()}
        return MultiVector(self.model, x.dual, comps)

    def embed_tilde_u(self, x: MultiVector) -> MultiVector:
        """exp(-x t) U(X) per homogeneous component, x = |X| - 1."""
        out = MultiVector.zero(self.model, x.dual)
        for k, xk in x.graded_components().items():
            out = out + self.embed_u(xk).map_coefficients(
                lambda c, m=-(k - 1): c.band_shift(m))
        return out

    def embed_hat_u(self, mu: MultiVector, a: int) -> MultiVector:
        """exp((|mu| + a) t) U(mu) per homogeneous component."""
        out = MultiVector.zero(self.model, mu.dual)
        for k, mu_k in mu.graded_components().items():
            out = out + self.embed_u(mu_k).map_coefficients(
                lambda c, m=k + a: c.band_shift(m))
        return out

    # -- inverses (injectivity witnesses) ----------------------------------

    def _restrict(self, x: MultiVector, band_of_degree) -> MultiVector:
        small = self.base.model
        comps = {}
        for m, c in x.components.items():
            k = bin(m).count("1")
            flat = c.band_shift(-band_of_degree(k))
            if not flat.is_time_independent():
                raise ModelMismatch("element is not in the image of the embedding")
            p = flat.band(0)
            comps[m] = Poly(small.nvars, {e[:-1]: v for e, v in p.terms.items()})
        return MultiVector(small, x.dual, comps)

    def unembed_u(self, x: MultiVector) -> MultiVector:
        return self._restrict(x, lambda k: 0)

    def unembed_tilde_u(self, x: MultiVector) -> MultiVector:
        return self._restrict(x, lambda k: -(k - 1))

    def unembed_hat_u(self, x: MultiVector, a: int) -> MultiVector:
        return self._restrict(x, lambda k: k + a)


def check_bracket_transport(ext: ExtendedAlgebroid, x: MultiVector, y: MultiVector) -> bool:
    """[[tilde_u X, tilde_u Y]]^ = tilde_u([[X, Y]]~): the deformed bracket is
    the plain bracket upstairs, conjugated by the exponential rescaling."""
    upstairs = schouten(ext.spec, ext.embed_tilde_u(x), ext.embed_tilde_u(y))
    downstairs = ext.embed_tilde_u(sj_bracket(ext.base, x, y))
    return upstairs == downstairs


def check_contraction_transport(ext: ExtendedAlgebroid, x: MultiVector,
                                mu: MultiVector, a: int) -> bool:
    """i_{tilde_u X} hat_u_a(mu) = e^t hat_u_a(i_X mu)."""
    lhs = interior(ext.embed_tilde_u(x), ext.embed_hat_u(mu, a))
    rhs = ext.embed_hat_u(interior(x, mu), a).map_coefficients(lambda c: c.band_shift(1))
    return lhs == rhs


def check_lie_transport(ext: ExtendedAlgebroid, x: MultiVector,
                        mu: MultiVector, a: int) -> bool:
    """L_{tilde_u X} hat_u_a(mu) = hat_u_a( weighted deformed Lie differential ),
    the weighted differential being L_X mu + (|mu|+a) i_{X_phi} mu
    - (-1)^x x phi ^ i_X mu."""
    lhs = lie_derivative(ext.spec, ext.embed_tilde_u(x), ext.embed_hat_u(mu, a))
    rhs = ext.embed_hat_u(jacobi_lie(ext.base, x, mu, a), a)
    return lhs == rhs


def check_morphism_u(ext: ExtendedAlgebroid, x: MultiVector, y: MultiVector) -> bool:
    """U commutes with the wedge and with the plain brackets."""
    wedge_ok = ext.embed_u(wedge(x, y)) == wedge(ext.embed_u(x), ext.embed_u(y))
    br_ok = (ext.embed_u(schouten(ext.base.spec, x, y))
             == schouten(ext.spec, ext.embed_u(x), ext.embed_u(y)))
    return wedge_ok and br_ok
