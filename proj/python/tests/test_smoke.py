import json
import math
import os

import pytest

import ahilb


def test_hilbert_function():
    assert ahilb.hilbert_function(2, n_max=4) == [1, 3, 6, 10, 15]
    assert ahilb.hilbert_function(1, [1], 0, 3) == [1, 1, 1, 1]


def test_fs_gram_closed_form():
    g = ahilb.fs_gram(1, 2)
    assert [g[i][i] for i in range(3)] == ["1/3", "1/6", "1/3"]


def test_lattice_invariants():
    z = {"gram": [["1"]]}
    assert ahilb.chi(z) == pytest.approx(0.0)
    assert ahilb.chi({"gram": [["4"]]}) == pytest.approx(-math.log(2.0))
    assert ahilb.h0_theta(z) == pytest.approx(0.0829015200, abs=1e-9)
    assert ahilb.h1_theta(z) == pytest.approx(ahilb.h0_theta(z))


def test_chi_sequence_matches_closed_form():
    seq = ahilb.chi_sequence(1, n_max=5)
    for p in seq:
        n = p["n"]
        ref = sum(0.5 * (math.lgamma(n + 2) - math.lgamma(n - a + 1) - math.lgamma(a + 1)) for a in range(n + 1))
        assert p["chi"] == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_estimate_p1():
    e = ahilb.estimate(1, n_min=20, n_max=400)
    assert e["c"] == pytest.approx(0.5, abs=0.02)


def test_conservation_and_blocks():
    r = ahilb.conservation(2, [2], 0, 5)
    assert r["passed"]
    assert all(d["exact"] and d["defect"] == 0.0 for d in r["degrees"])
    assert ahilb.deformation_blocks(1, [1], 1)["total_rank"] == 5
    assert ahilb.isotypic(1, [1], 3)["holds"]


def test_envelope_of_convex_symbol_is_itself():
    s = ahilb.fs_symbol(T=8.0, nodes=161)
    e = ahilb.envelope(s)
    assert len(e["values"]) == len(s["values"])


def test_sequence_inequality():
    holds, slack = ahilb.sequence_inequality({(0, 0): 1.0}, 1, 0.5)
    assert holds and slack == pytest.approx(0.5)
    with pytest.raises(ahilb.PreconditionError):
        ahilb.sequence_inequality({(0, 0): 1.0}, 1, 0.9)


def test_cli_in_process():
    code, out, _ = ahilb.run("hilbert", "--variety", "p1", "--n-max", "2")
    assert code == 0
    assert json.loads(out)["values"] == [1, 2, 3]
    assert ahilb.run("hilbert", "--variety", "q7")[0] == 2


def test_module_location():
    stage = os.environ.get("AHILB_PYTHON_PATH")
    if stage:
        assert ahilb._core.__file__.startswith(stage)
