import json
import math
import os
import subprocess

import numpy as np
import pytest

import derham


def test_metric_product_law_and_factorization():
    inst = derham.generate_random_product_metric([2, 3], seed=7)
    assert inst.space.size == 6
    assert len(inst.factors) == 2

    rebuilt = derham.product(inst.factors[0], inst.factors[1])
    assert np.allclose(rebuilt.matrix, inst.space.matrix, atol=1e-12)

    rep = derham.factorize(inst.space)
    assert rep.complete and rep.unique
    assert len(rep.factors) == 2
    assert sorted(f.size for f in rep.factors) == [2, 3]

    wl = derham.enumerate_witnesses(inst.space)
    assert wl.complete and len(wl.witnesses) >= 1


def test_validate_flags_triangle_violation():
    bad = derham.FiniteMetricSpace(
        ["a", "b", "c"],
        np.array([[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]]),
    )
    rep = derham.validate_metric(bad)
    assert not rep.ok
    assert any(v.kind == derham.MetricDefect.triangle for v in rep.violations)


def test_find_isometry_after_shuffle():
    inst = derham.generate_shuffled_product([2, 2], seed=5)
    canonical = derham.product(inst.factors[0], inst.factors[1])
    perm = derham.find_isometry(canonical, inst.space)
    assert perm is not None
    assert sorted(perm) == list(range(4))


def test_defect_of_the_square():
    sq = derham.linf_space(2)
    x = np.array([1.0, 1.0])
    y = np.array([1.0, -1.0])
    assert derham.defect_ratio(sq, x, y) == pytest.approx(math.sqrt(2.0), abs=1e-12)

    rep = derham.defect(sq, starts=128, seed=11)
    assert rep.certified_global
    assert rep.m_value == pytest.approx(math.sqrt(2.0), abs=1e-9)


def test_inscribed_ellipsoid_of_the_cross_polytope():
    res = derham.max_inscribed_ellipsoid(derham.l1_space(2))
    assert res.converged
    # inscribed disk of radius 1/sqrt(2): shape matrix 2 I
    assert np.allclose(res.ellipsoid.shape, 2.0 * np.eye(2), atol=1e-5)


def test_rotated_pair_certificates():
    inst = derham.generate_rotated_euclidean_pair(4, seed=3)
    assert len(inst.pairs) >= 1
    pp = inst.pairs[0]

    strike = derham.check_strike(pp, starts=32, seed=11)
    assert strike.euclidean_confirmed and not strike.refused

    eig = derham.composed_projection_eigen(pp)
    assert eig.ok
    assert 0.0 < eig.lambda_ < 1.0
    assert eig.lambda_ == pytest.approx(eig.lambda_algebraic, abs=1e-8)


def test_gruber_decomposition_of_a_planted_sum():
    inst = derham.generate_random_polytope_norm([2, 2], 3, seed=11, distort=False)
    body = derham.make_body(inst.space.vertices)
    dec = derham.gruber_decompose(body)
    assert not dec.partial
    assert sorted(p.sub.dim for p in dec.parts) == [2, 2]


def test_serialization_roundtrips():
    inst = derham.generate_random_product_metric([2, 2], seed=9)

    back = derham.metric_from_json(derham.metric_to_json(inst.space))
    assert back.labels == inst.space.labels
    assert np.array_equal(back.matrix, inst.space.matrix)

    csv_back = derham.metric_from_csv(derham.metric_to_csv(inst.space))
    assert np.allclose(csv_back.matrix, inst.space.matrix, atol=1e-12)

    p4 = derham.pnorm_space(3, 4.0)
    nback = derham.norm_from_json(derham.norm_to_json(p4))
    assert nback.form == "p_norm" and nback.dim == 3
    v = np.array([0.3, -1.2, 0.7])
    assert derham.norm(nback, v) == pytest.approx(derham.norm(p4, v), abs=1e-15)


@pytest.mark.skipif("DERHAM_CLI" not in os.environ, reason="cli path not exported")
def test_cli_factor_smoke(tmp_path):
    inst = derham.generate_random_product_metric([2, 3], seed=7)
    inp = tmp_path / "instance.json"
    out = tmp_path / "report.json"
    inp.write_text(derham.metric_instance_to_json(inst))

    proc = subprocess.run(
        [os.environ["DERHAM_CLI"], "factor", "--input", str(inp), "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    rep = json.loads(out.read_text())
    assert rep["schema"] == derham.SCHEMA
    assert rep["result"]["factor_count"] == 2
