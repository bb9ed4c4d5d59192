import json
import random

import pytest

from cuspsheaves.cusp import CuspRingContext
from cuspsheaves.errors import ParseError
from cuspsheaves.field import Field
from cuspsheaves.sampling import random_lattice
from cuspsheaves.serialize import SCHEMA, dumps, loads, make_document, parse_document
from cuspsheaves.triples import (functor_on_morphism, model_from_lattices, random_morphism,
                                 random_phimap, random_triple, to_triple)

FIELDS = [Field.Q(), Field.GF(7), Field.GF(10007)]


def instances(seed, F):
    rng = random.Random(seed)
    ctx = CuspRingContext(F, 12)
    M = random_lattice(rng, ctx)
    S = model_from_lattices([M, random_lattice(rng, ctx, r=M.rank)], rng.randint(-3, 3))
    S2 = model_from_lattices([random_lattice(rng, ctx, r=2) for _ in range(2)])
    f = random_morphism(rng, S, S2)
    yield M
    yield random_phimap(rng, F, 2, rng.randint(0, 2), ctx=ctx, with_tails=True)
    yield random_triple(rng, F, 2, 1, n=2, degree=1)
    yield to_triple(S)
    yield S
    yield f
    yield functor_on_morphism(f)


def roundtrip(x, F):
    text = dumps(x, F, 12)
    y = loads(text)[0]
    assert dumps(y, F, 12) == text
    return y


@pytest.mark.parametrize("F", FIELDS, ids=str)
@pytest.mark.parametrize("seed", range(6))
def test_roundtrip_all_kinds(F, seed):
    for x in instances(seed, F):
        y = roundtrip(x, F)
        if hasattr(x, "equals"):
            assert y.equals(x)
        elif type(x).__eq__ is not object.__eq__:
            assert y == x


def base_doc():
    return {"schema": SCHEMA, "field": {"type": "q"}, "precision": 12,
            "payload": {"kind": "lattice", "rank": 1, "generators": [[["1"]]]}}


def test_document_ok_and_report_ignored():
    doc = base_doc()
    doc["report"] = {"anything": 1}
    M, kind, F, N = parse_document(doc)
    assert kind == "lattice" and F == Field.Q() and N == 12 and M.rank == 1


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(extra=1),
    lambda d: d.update(schema="cuspsheaves/0"),
    lambda d: d.update(precision=5),
    lambda d: d.update(precision="12"),
    lambda d: d.update(field={"type": "fp", "p": 8}),
    lambda d: d["payload"].update(kind="nope"),
    lambda d: d["payload"].update(colour="red"),
    lambda d: d["payload"].update(generators=[[["1.5"]]]),
    lambda d: d["payload"].update(generators=[[[1]]]),
    lambda d: d["payload"].update(generators=[[["1"], ["0"]]]),
    lambda d: d["payload"].update(generators=[[["1"] * 14]]),
    lambda d: d.pop("payload"),
])
def test_rejections(mutate):
    doc = base_doc()
    mutate(doc)
    with pytest.raises(ParseError):
        parse_document(doc)


def test_expected_kind_enforced():
    with pytest.raises(ParseError):
        parse_document(base_doc(), {"triple"})
    with pytest.raises(ParseError):
        loads("{not json")


def test_scalars_are_strings():
    rng = random.Random(0)
    F = Field.Q()
    T = random_triple(rng, F, 2, 2)
    doc = make_document(T, F, 12)

    def walk(x):
        if isinstance(x, dict):
            for k, v in x.items():
                if k not in ("rank", "degree", "a", "r", "splitting_type"):
                    walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
        else:
            assert isinstance(x, str)
    walk(doc["payload"]["cusps"])
    json.dumps(doc)
