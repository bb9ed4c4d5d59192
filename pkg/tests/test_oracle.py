import ast
from pathlib import Path

from cuspsheaves import oracle
from cuspsheaves.cusp import CuspRingContext
from cuspsheaves.extension import PhiMap, pushout
from cuspsheaves.lattice import decompose
from cuspsheaves.oracle import (OracleReport, oracle_min_generators, oracle_precision_stability,
                                oracle_torsion)

from conftest import Q, lattice


def test_min_generators_examples(ctx):
    assert oracle_min_generators(lattice(ctx, [[[1]]])) == 1
    assert oracle_min_generators(lattice(ctx, [[[0, 0, 1]], [[0, 0, 0, 1]]])) == 2
    assert oracle_min_generators(lattice(ctx, [[[1], [0, 1]], [[0, 0, 1], []],
                                               [[0, 0, 0, 1], []]])) == 3


def test_torsion_examples(ctx):
    assert oracle_torsion(pushout(PhiMap.from_lists(Q, [[0]], [[0]]), ctx)) is not None
    assert oracle_torsion(pushout(PhiMap.from_lists(Q, [[1, 0], [0, 1]], [[0, 0], [0, 0]]),
                                  ctx)) is None


def test_precision_stability_example():
    M = lattice(CuspRingContext(Q, 6), [[[0, 0, 1]], [[0, 0, 0, 1]]])
    rep = oracle_precision_stability(lambda X, N: decompose(X.with_precision(N)).ab, M, 6)
    assert rep.agree and rep.details["output"] == [0, 1]
    assert rep.details["precisions"] == [6, 7, 8]


def test_instability_is_reported():
    def flaky(_, N):
        if N == 8:
            raise ValueError("boom")
        return 1
    rep = oracle_precision_stability(flaky, None, 6, seed="s")
    assert not rep.agree and rep.witness is not None
    assert '"seed":"s"' in rep.to_json()


def test_report_json_is_canonical():
    rep = OracleReport("c", "1:2", "agree", None, {"b": 1, "a": 2})
    assert rep.to_json() == '{"check":"c","details":{"a":2,"b":1},"seed":"1:2","verdict":"agree"}'


def test_oracle_depends_only_on_linear_algebra():
    tree = ast.parse(Path(oracle.__file__).read_text())
    local = {n.module for n in ast.walk(tree) if isinstance(n, ast.ImportFrom) and n.level}
    assert local <= {"linalg", "field", "series", "cusp"}
