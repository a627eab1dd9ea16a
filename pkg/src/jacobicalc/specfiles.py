"""Structured spec files for algebroids and bialgebroids.

The on-disk format is YAML (hand-editable key/value with nested lists),
with a versioned ``schema`` field:

    schema: jacobi-spec/1
    base_dim: 2            # coordinates x1..xN of the base
    fiber_rank: 3          # basis e1..eR, duals eps1..epsR
    anchor:                # R rows of N polynomial strings
      - ["1", "0"]
      - ["0", "1"]
      - ["0", "0"]
    structure:             # sparse antisymmetric table, i < j
      - {i: 1, j: 2, k: 3, poly: "1"}
    phi: "eps3"            # optional 1-cocycle expression
    p: "e1^e2"             # optional degree-2 element expression

    schema: jacobi-bispec/1
    e_side:  { ...jacobi-spec fields with phi... }
    dual_side: { anchor, structure, phi }   # phi = the cocycle in e1..eR

The ``dual_side`` structure and anchor describe the algebroid on the dual
basis eps1..epsR over the same model.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .algebroid import AlgebroidSpec
from .courant import JacobiBialgebroid
from .exterior import BundleModel, MultiVector
from .expressions import ParseError, parse_element, parse_scalar
from .jacobi import JacobiAlgebroid, JacobiElement

SCHEMA_SPEC = "jacobi-spec/1"
SCHEMA_BISPEC = "jacobi-bispec/1"


class SpecFileError(ValueError):
    """Malformed or inconsistent spec document."""


@dataclass
class LoadedSpec:
    spec: AlgebroidSpec
    phi: MultiVector | None = None
    p: MultiVector | None = None

    def jacobi_algebroid(self) -> JacobiAlgebroid:
        if self.phi is None:
            raise SpecFileError("document has no 'phi' cocycle")
        return JacobiAlgebroid(self.spec, self.phi)

    def jacobi_element(self) -> JacobiElement:
        if self.p is None:
            raise SpecFileError("document has no 'p' element")
        return JacobiElement(self.jacobi_algebroid(), self.p)


def _parse_spec_body(doc: dict, model: BundleModel | None = None,
                     sections_dual: bool = False) -> tuple[AlgebroidSpec, BundleModel]:
    try:
        if model is None:
            model = BundleModel(int(doc["base_dim"]), int(doc["fiber_rank"]))
        anchor_rows = doc.get("anchor") or [[]] * model.fiber_rank
        if len(anchor_rows) != model.fiber_rank:
            raise SpecFileError(f"anchor needs {model.fiber_rank} rows")
        anchor = []
        for row in anchor_rows:
            if len(row) != model.base_dim:
                raise SpecFileError(f"anchor rows need {model.base_dim} entries")
            anchor.append([parse_scalar(str(entry), model) for entry in row])
        structure: dict[tuple[int, int], dict[int, object]] = {}
        for item in doc.get("structure") or []:
            i, j, k = int(item["i"]), int(item["j"]), int(item["k"])
            coeff = parse_scalar(str(item["poly"]), model)
            if i == j:
                raise SpecFileError("structure entries need i != j")
            if i > j:
                i, j, coeff = j, i, -coeff
            col = structure.setdefault((i, j), {})
            col[k] = col[k] + coeff if k in col else coeff
        return AlgebroidSpec(model, anchor, structure, sections_dual=sections_dual), model
    except (KeyError, TypeError, ValueError, ParseError) as exc:
        if isinstance(exc, SpecFileError):
            raise
        raise SpecFileError(f"malformed spec document: {exc}") from exc


def load_algebroid_doc(doc: dict) -> LoadedSpec:
    if doc.get("schema") != SCHEMA_SPEC:
        raise SpecFileError(f"expected schema {SCHEMA_SPEC!r}, got {doc.get('schema')!r}")
    spec, model = _parse_spec_body(doc)
    phi = None
    if doc.get("phi") is not None:
        phi = parse_element(str(doc["phi"]), model, dual=True)
    p = None
    if doc.get("p") is not None:
        p = parse_element(str(doc["p"]), model, dual=False)
    return LoadedSpec(spec, phi, p)


def load_algebroid(path: str | Path) -> LoadedSpec:
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise SpecFileError("spec file must hold a mapping")
    return load_algebroid_doc(doc)


def load_bialgebroid_doc(doc: dict) -> JacobiBialgebroid:
    if doc.get("schema") != SCHEMA_BISPEC:
        raise SpecFileError(f"expected schema {SCHEMA_BISPEC!r}, got {doc.get('schema')!r}")
    e_doc = doc.get("e_side")
    d_doc = doc.get("dual_side")
    if not isinstance(e_doc, dict) or not isinstance(d_doc, dict):
        raise SpecFileError("bialgebroid document needs e_side and dual_side mappings")
    spec_e, model = _parse_spec_body(e_doc)
    phi0 = parse_element(str(e_doc.get("phi", "0")), model, dual=True)
    spec_d, _ = _parse_spec_body(d_doc, model=model, sections_dual=True)
    x0 = parse_element(str(d_doc.get("phi", "0")), model, dual=False)
    return JacobiBialgebroid(JacobiAlgebroid(spec_e, phi0),
                             JacobiAlgebroid(spec_d, x0))


def load_bialgebroid(path: str | Path) -> JacobiBialgebroid:
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise SpecFileError("spec file must hold a mapping")
    return load_bialgebroid_doc(doc)


def builtin_documents() -> dict[str, dict]:
    """Named ready-made spec documents (used by the CLI and the docs)."""
    tm2 = {
        "schema": SCHEMA_SPEC,
        "base_dim": 2,
        "fiber_rank": 2,
        "anchor": [["1", "0"], ["0", "1"]],
        "structure": [],
        "phi": "0",
    }
    tm2r = {
        "schema": SCHEMA_SPEC,
        "base_dim": 2,
        "fiber_rank": 3,
        "anchor": [["1", "0"], ["0", "1"], ["0", "0"]],
        "structure": [],
        "phi": "eps3",
    }
    tm3r_contact = {
        "schema": SCHEMA_SPEC,
        "base_dim": 3,
        "fiber_rank": 4,
        "anchor": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"],
                   ["0", "0", "0"]],
        "structure": [],
        "phi": "eps4",
        "p": "e1^e2 + x2*e3^e2 + e4^e3",
    }
    sl2 = {
        "schema": SCHEMA_SPEC,
        "base_dim": 0,
        "fiber_rank": 3,
        "anchor": [[], [], []],
        "structure": [
            {"i": 1, "j": 2, "k": 2, "poly": "2"},
            {"i": 1, "j": 3, "k": 3, "poly": "-2"},
            {"i": 2, "j": 3, "k": 1, "poly": "1"},
        ],
        "phi": "0",
    }
    nonabelian2 = {
        "schema": SCHEMA_SPEC,
        "base_dim": 0,
        "fiber_rank": 2,
        "anchor": [[], []],
        "structure": [{"i": 1, "j": 2, "k": 2, "poly": "1"}],
        "phi": "eps1",
    }
    return {"tm2": tm2, "tm2r": tm2r, "contact": tm3r_contact,
            "sl2": sl2, "nonabelian2": nonabelian2}


def write_document(doc: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)
