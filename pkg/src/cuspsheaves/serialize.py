"""JSON documents: exact scalars as strings, series as coefficient arrays."""
from __future__ import annotations

import json

from .cusp import CuspRingContext
from .errors import ParseError
from .extension import PhiMap
from .field import Field
from .lattice import Decomposition, Lattice
from .linalg import KMatrix
from .series import PSeries
from .triples import (BundleData, CuspTriple, LatticeMorphism, SheafModel, Triple,
                      TripleMorphism, cusp_morphism_data)

SCHEMA = "cuspsheaves/1"
DOC_KEYS = {"schema", "field", "precision", "payload"}


def _check_keys(obj, required, optional=(), where="object"):
    if not isinstance(obj, dict):
        raise ParseError(f"{where} must be a JSON object")
    keys = set(obj)
    missing = set(required) - keys
    extra = keys - set(required) - set(optional)
    if missing:
        raise ParseError(f"{where}: missing {sorted(missing)}")
    if extra:
        raise ParseError(f"{where}: unknown fields {sorted(extra)}")


def _int(x, where, minimum=None):
    if not isinstance(x, int) or isinstance(x, bool):
        raise ParseError(f"{where} must be an integer")
    if minimum is not None and x < minimum:
        raise ParseError(f"{where} must be >= {minimum}")
    return x


def _list(x, where):
    if not isinstance(x, list):
        raise ParseError(f"{where} must be an array")
    return x


# ---------------------------------------------------------------- scalars

def dump_series(x: PSeries):
    cs = list(x.coeffs)
    while cs and not cs[-1]:
        cs.pop()
    return [str(c) for c in cs]


def load_series(obj, ctx: CuspRingContext, where="series") -> PSeries:
    obj = _list(obj, where)
    if len(obj) > ctx.precision + 1:
        raise ParseError(f"{where}: {len(obj)} coefficients exceed precision {ctx.precision}")
    return ctx.series([ctx.field.parse(c) for c in obj])


def dump_matrix(M: KMatrix):
    return [[str(x) for x in row] for row in M.entries]


def load_matrix(obj, field: Field, nrows: int, ncols: int, where="matrix") -> KMatrix:
    obj = _list(obj, where)
    if len(obj) != nrows or any(len(_list(row, where)) != ncols for row in obj):
        raise ParseError(f"{where} must be {nrows} x {ncols}")
    return KMatrix([[field.parse(x) for x in row] for row in obj], field, ncols=ncols)


def dump_series_matrix(Fm):
    return [[dump_series(x) for x in row] for row in Fm]


def load_series_matrix(obj, ctx, nrows, ncols, where="series matrix"):
    obj = _list(obj, where)
    if len(obj) != nrows or any(len(_list(row, where)) != ncols for row in obj):
        raise ParseError(f"{where} must be {nrows} x {ncols}")
    return tuple(tuple(load_series(x, ctx, where) for x in row) for row in obj)


# ---------------------------------------------------------------- payloads

def dump_lattice(M: Lattice):
    return {"kind": "lattice", "rank": M.rank,
            "generators": [[dump_series(x) for x in g] for g in M.generators]}


def load_lattice(obj, ctx):
    _check_keys(obj, {"kind", "rank", "generators"}, where="lattice")
    r = _int(obj["rank"], "lattice.rank", 1)
    gens = []
    for g in _list(obj["generators"], "lattice.generators"):
        if len(_list(g, "generator")) != r:
            raise ParseError(f"every generator needs {r} entries")
        gens.append(tuple(load_series(x, ctx, "generator entry") for x in g))
    return Lattice(r, tuple(gens), ctx)


def _dump_phi_body(phi: PhiMap):
    out = {"a": phi.a, "r": phi.r, "A": dump_matrix(phi.A), "B": dump_matrix(phi.B)}
    if phi.H is not None:
        out["H"] = dump_series_matrix(phi.H)
    return out


def _load_phi_body(obj, ctx, where="phimap"):
    a = _int(obj["a"], f"{where}.a", 0)
    r = _int(obj["r"], f"{where}.r", 1)
    A = load_matrix(obj["A"], ctx.field, r, a, f"{where}.A")
    B = load_matrix(obj["B"], ctx.field, r, a, f"{where}.B")
    H = load_series_matrix(obj["H"], ctx, r, a, f"{where}.H") if "H" in obj else None
    return PhiMap(a, r, A, B, H)


def dump_phimap(phi: PhiMap):
    return {"kind": "phimap", **_dump_phi_body(phi)}


def load_phimap(obj, ctx):
    _check_keys(obj, {"kind", "a", "r", "A", "B"}, {"H"}, where="phimap")
    return _load_phi_body(obj, ctx)


def _dump_bundle(E: BundleData):
    out = {"rank": E.rank, "degree": E.degree}
    if E.splitting_type is not None:
        out["splitting_type"] = list(E.splitting_type)
    if E.trivializations:
        out["trivializations"] = [dump_matrix(T) for T in E.trivializations]
    return out


def _load_bundle(obj, field):
    _check_keys(obj, {"rank", "degree"}, {"splitting_type", "trivializations"}, where="bundle")
    r = _int(obj["rank"], "bundle.rank", 1)
    d = _int(obj["degree"], "bundle.degree")
    st = None
    if "splitting_type" in obj:
        st = tuple(_int(x, "splitting_type entry") for x in _list(obj["splitting_type"], "splitting_type"))
    triv = tuple(load_matrix(T, field, r, r, "trivialization")
                 for T in _list(obj.get("trivializations", []), "trivializations"))
    return BundleData(r, d, st, triv)


def dump_triple(T: Triple):
    return {"kind": "triple", "bundle": _dump_bundle(T.E),
            "cusps": [{"a": c.a, "V": dump_matrix(c.V), "sigma": dump_matrix(c.sigma)}
                      for c in T.cusps]}


def load_triple(obj, ctx):
    _check_keys(obj, {"kind", "bundle", "cusps"}, where="triple")
    E = _load_bundle(obj["bundle"], ctx.field)
    cusps = []
    for c in _list(obj["cusps"], "triple.cusps"):
        _check_keys(c, {"a", "V", "sigma"}, where="triple cusp")
        a = _int(c["a"], "cusp.a", 0)
        cusps.append(CuspTriple(a, load_matrix(c["V"], ctx.field, 2 * E.rank, a, "V"),
                                load_matrix(c["sigma"], ctx.field, a, a, "sigma")))
    return Triple(E, tuple(cusps))


def _dump_model_body(S: SheafModel):
    return {"rank": S.rank, "degree": S.degree, "cusps": [_dump_phi_body(p) for p in S.cusps]}


def dump_sheaf_model(S: SheafModel):
    return {"kind": "sheaf_model", **_dump_model_body(S)}


def _load_model_body(obj, ctx, where="sheaf_model"):
    r = _int(obj["rank"], f"{where}.rank", 1)
    d = _int(obj["degree"], f"{where}.degree")
    phis = []
    for c in _list(obj["cusps"], f"{where}.cusps"):
        _check_keys(c, {"a", "r", "A", "B"}, {"H"}, where=f"{where} cusp")
        phis.append(_load_phi_body(c, ctx))
    return SheafModel(r, d, tuple(phis))


def load_sheaf_model(obj, ctx):
    _check_keys(obj, {"kind", "rank", "degree", "cusps"}, where="sheaf_model")
    return _load_model_body(obj, ctx)


def _model_keys(obj, where):
    _check_keys(obj, {"rank", "degree", "cusps"}, where=where)


def dump_morphism(f: LatticeMorphism):
    return {"kind": "morphism", "source": _dump_model_body(f.source),
            "target": _dump_model_body(f.target),
            "maps": [dump_series_matrix(F) for F in f.maps]}


def load_morphism(obj, ctx):
    _check_keys(obj, {"kind", "source", "target", "maps"}, where="morphism")
    _model_keys(obj["source"], "morphism.source")
    _model_keys(obj["target"], "morphism.target")
    S = _load_model_body(obj["source"], ctx, "morphism.source")
    S2 = _load_model_body(obj["target"], ctx, "morphism.target")
    maps = tuple(load_series_matrix(F, ctx, S2.rank, S.rank, "morphism map")
                 for F in _list(obj["maps"], "morphism.maps"))
    return LatticeMorphism(S, S2, maps, ctx.precision)


def _strip_kind(d):
    return {k: v for k, v in d.items() if k != "kind"}


def dump_triple_morphism(Phi: TripleMorphism):
    out = {"kind": "triple_morphism",
           "source": _strip_kind(dump_triple(Phi.source)),
           "target": _strip_kind(dump_triple(Phi.target)),
           "cusps": [{"phi0": dump_matrix(c.phi0), "phi1": dump_matrix(c.phi1),
                      "f_pbar": dump_matrix(c.f_pbar)} for c in Phi.cusps]}
    if Phi.series is not None:
        out["series"] = [dump_series_matrix(F) for F in Phi.series]
    return out


def load_triple_morphism(obj, ctx):
    _check_keys(obj, {"kind", "source", "target", "cusps"}, {"series"}, where="triple_morphism")
    T = load_triple({"kind": "triple", **_as_dict(obj["source"])}, ctx)
    T2 = load_triple({"kind": "triple", **_as_dict(obj["target"])}, ctx)
    r, r2 = T.E.rank, T2.E.rank
    cusps_obj = _list(obj["cusps"], "triple_morphism.cusps")
    if len(cusps_obj) != len(T.cusps) or len(T.cusps) != len(T2.cusps):
        raise ParseError("triple_morphism needs one entry per cusp on both sides")
    cusps = []
    for c, t1, t2 in zip(cusps_obj, T.cusps, T2.cusps):
        _check_keys(c, {"phi0", "phi1", "f_pbar"}, where="triple_morphism cusp")
        cusps.append(cusp_morphism_data(
            load_matrix(c["phi0"], ctx.field, r2, r, "phi0"),
            load_matrix(c["phi1"], ctx.field, r2, r, "phi1"), t1, t2,
            load_matrix(c["f_pbar"], ctx.field, t2.a, t1.a, "f_pbar")))
    series = None
    if "series" in obj:
        series = tuple(load_series_matrix(F, ctx, r2, r, "series")
                       for F in _list(obj["series"], "series"))
    return TripleMorphism(T, T2, tuple(cusps), series)


def _as_dict(x):
    if not isinstance(x, dict):
        raise ParseError("expected an object")
    if "kind" in x:
        raise ParseError("nested objects carry no 'kind'")
    return x


def dump_decomposition(dec: Decomposition):
    return {"kind": "decomposition", "a": dec.a, "b": dec.b,
            "free_vectors": [[str(x) for x in v] for v in dec.free_vectors],
            "saturated_vectors": [[str(x) for x in w] for w in dec.sat_vectors],
            "basis_change": dump_matrix(dec.basis_change),
            "nakayama_indices": list(dec.nakayama_indices),
            "delta": dec.delta, "conductor": dec.conductor,
            "transcript": [{"generator": t.generator,
                            "free": [dump_series(x) for x in t.g],
                            "saturated": [dump_series(x) for x in t.h],
                            "free_in_R": t.g_in_R} for t in dec.transcript]}


LOADERS = {"lattice": load_lattice, "phimap": load_phimap, "triple": load_triple,
           "sheaf_model": load_sheaf_model, "morphism": load_morphism,
           "triple_morphism": load_triple_morphism}

DUMPERS = {Lattice: dump_lattice, PhiMap: dump_phimap, Triple: dump_triple,
           SheafModel: dump_sheaf_model, LatticeMorphism: dump_morphism,
           TripleMorphism: dump_triple_morphism, Decomposition: dump_decomposition}


# ---------------------------------------------------------------- documents

def payload_of(x):
    if isinstance(x, dict):
        return x
    dumper = DUMPERS.get(type(x))
    if dumper is None:
        raise TypeError(f"cannot serialize {type(x).__name__}")
    return dumper(x)


def make_document(x, field: Field, precision: int) -> dict:
    return {"schema": SCHEMA, "field": field.descriptor(), "precision": precision,
            "payload": payload_of(x)}


def dumps(x, field: Field, precision: int) -> str:
    return json.dumps(make_document(x, field, precision), sort_keys=True, indent=1)


def parse_document(doc, expected_kinds=None):
    """(payload object, kind, field, precision) from a decoded document."""
    # "report" carries command output alongside a payload and is not parsed
    _check_keys(doc, DOC_KEYS, {"report"}, where="document")
    if doc["schema"] != SCHEMA:
        raise ParseError(f"unsupported schema {doc['schema']!r}")
    field = Field.from_descriptor(doc["field"])
    N = _int(doc["precision"], "precision", 6)
    payload = doc["payload"]
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ParseError("payload must be an object with a 'kind'")
    kind = payload["kind"]
    if kind not in LOADERS:
        raise ParseError(f"unknown payload kind {kind!r}")
    if expected_kinds is not None and kind not in expected_kinds:
        raise ParseError(f"expected payload of kind {sorted(expected_kinds)}, got {kind!r}")
    ctx = CuspRingContext(field, N)
    return LOADERS[kind](payload, ctx), kind, field, N


def loads(text: str, expected_kinds=None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return parse_document(doc, expected_kinds)
