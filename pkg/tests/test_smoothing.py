"""Smoothing functors and the interleaving map pairs from the proofs."""

import numpy as np
import pytest

from reebsmooth.complexes import ScalarField, SimplicialComplex
from reebsmooth.errors import ValidationError
from reebsmooth.measures import EmpiricalMeasure
from reebsmooth.meshes import circle_complex, random_field, three_loop_rig, torus_mesh
from reebsmooth.reeb import is_isomorphic, reeb_graph, slab_oracle
from reebsmooth.smoothing import (
    SmoothingFactor,
    VertexMap,
    build_ambient_interleaving,
    build_local_interleaving,
    clamp_projection,
    smooth_global,
    smooth_local,
    verify_commutativity,
    verify_function_preservation,
)


def test_circle_contraction_thresholds():
    # range L = 2: the loop survives eps < 1 with value span L - 2*eps
    X, f = circle_complex(32)
    for eps, betti in ((0.5, 1), (0.9, 1), (1.1, 0)):
        g = smooth_global(X, f, eps)
        assert g.betti1() == betti
        if betti == 1:
            span = float(g.node_values.max() - g.node_values.min())
            # outer span still 2 + 2eps; the surviving loop is the inner pair
            loop_vals = sorted(set(g.node_values.tolist()))[1:-1]
            assert len(loop_vals) == 2
            assert loop_vals[1] - loop_vals[0] == pytest.approx(2.0 - 2.0 * eps, abs=1e-9)
            assert span == pytest.approx(2.0 + 2.0 * eps, abs=1e-9)


def test_circle_smoothing_against_slab_oracle():
    X, f = circle_complex(32)
    for eps in (0.5, 0.9, 1.1):
        from reebsmooth.complexes import thicken_global

        thick = thicken_global(X, f, eps)
        assert is_isomorphic(
            smooth_global(X, f, eps), slab_oracle(thick.complex, thick.field)
        )


def test_contraction_boundary_convention():
    # at exactly eps = L/2 the loop contracts (tie resolved by vertex order)
    X, f = circle_complex(32)
    assert smooth_global(X, f, 1.0).betti1() == 0


def test_constant_factor_reduction():
    for X, f in (circle_complex(20), torus_mesh(8, 8), three_loop_rig()):
        for eps in (0.2, 0.6):
            r = ScalarField(np.full(X.n_vertices, eps))
            assert is_isomorphic(smooth_local(X, f, r), smooth_global(X, f, eps))


def test_smoothing_never_increases_betti():
    rng = np.random.default_rng(9)
    X, f = three_loop_rig()
    base = reeb_graph(X, f).betti1()
    for eps in (0.05, 0.2, 0.5, 1.0):
        assert smooth_global(X, f, eps).betti1() <= base


def test_smooth_reeb_graph_directly():
    X, f = circle_complex(24)
    g = reeb_graph(X, f)
    sm = smooth_global(g, None, 0.3)
    assert sm.betti1() == 1
    assert float(sm.node_values.min()) == pytest.approx(-1.3, abs=1e-12)
    assert float(sm.node_values.max()) == pytest.approx(1.3, abs=1e-12)
    with pytest.raises(ValidationError):
        smooth_global(g, f, 0.3)  # field argument is the graph's own values


def test_local_interleaving_equal_radii_is_identity():
    X, f = torus_mesh(6, 6)
    r = ScalarField(np.full(X.n_vertices, 0.4))
    pair = build_local_interleaving(X, f, r, r)
    assert pair.eps == 0.0
    assert float(np.max(np.abs(pair.forward.residual))) == 0.0
    assert float(np.max(np.abs(pair.backward.residual))) == 0.0
    # zero-residual maps send each layer to itself
    assert np.array_equal(pair.forward.source_offset, pair.forward.target_offset)
    g1 = smooth_local(X, f, r)
    g2 = smooth_local(X, f, r)
    assert is_isomorphic(g1, g2)


def test_local_interleaving_one_two_hand_values():
    # r1 = 1, r2 = 2 on a single edge: forward residuals all 0 (|t| <= 1 <= 2),
    # backward residuals t - clamp(t, 1) with max exactly 1 at t = +-2
    X = SimplicialComplex.build([(0, (0.0,)), (1, (1.0,))], [(0, 1)])
    f = ScalarField(np.array([0.0, 0.5]))
    r1 = ScalarField(np.ones(2))
    r2 = ScalarField(np.full(2, 2.0))
    pair = build_local_interleaving(X, f, r1, r2)
    assert pair.eps == 1.0
    assert float(np.max(np.abs(pair.forward.residual))) == 0.0
    assert float(np.max(np.abs(pair.backward.residual))) == 1.0
    rep = verify_function_preservation(pair)
    assert rep["passed"] and rep["max_violation"] == 0.0
    com = verify_commutativity(pair)
    assert com["passed"]
    com_fine = verify_commutativity(pair, samples=64)  # finer path discretization
    assert com_fine["passed"]


def test_local_interleaving_random_radii_residual_bound():
    rng = np.random.default_rng(13)
    X, f = torus_mesh(6, 6)
    for _ in range(5):
        r1 = ScalarField(rng.uniform(0.1, 1.0, X.n_vertices))
        r2 = ScalarField(rng.uniform(0.1, 1.0, X.n_vertices))
        pair = build_local_interleaving(X, f, r1, r2)
        eps = float(np.max(np.abs(r1.values - r2.values)))
        assert pair.eps == pytest.approx(eps, abs=0.0)
        for vm in (pair.forward, pair.backward):
            assert np.all(np.abs(vm.residual) <= eps + 1e-12)
        assert verify_function_preservation(pair)["passed"]
        assert verify_commutativity(pair)["passed"]


def test_ambient_interleaving_identity_and_random():
    X, f = torus_mesh(6, 6)
    pair0 = build_ambient_interleaving(X, f, f)
    assert pair0.eps == 0.0
    assert verify_commutativity(pair0)["max_violation"] == 0.0

    rng = np.random.default_rng(21)
    g = ScalarField(f.values + rng.uniform(-0.3, 0.3, X.n_vertices))
    pair = build_ambient_interleaving(X, f, g)
    assert pair.eps == float(np.max(np.abs(f.values - g.values)))
    prep = verify_function_preservation(pair)
    assert prep["passed"] and prep["max_violation"] <= 1e-12
    com = verify_commutativity(pair)
    # the two residuals are fl(f-g) and fl(g-f); IEEE negation is exact
    assert com["passed"] and com["max_violation"] == 0.0


def test_corrupted_residual_fails_verification():
    X, f = circle_complex(12)
    r1 = ScalarField(np.full(X.n_vertices, 0.5))
    r2 = ScalarField(np.full(X.n_vertices, 0.8))
    pair = build_local_interleaving(X, f, r1, r2)
    bad = VertexMap(
        base=pair.forward.base,
        source_offset=pair.forward.source_offset,
        target_offset=pair.forward.target_offset,
        residual=pair.forward.residual + 1e-6,
    )
    broken = type(pair)(
        kind=pair.kind,
        eps=pair.eps,
        forward=bad,
        backward=pair.backward,
        base=pair.base,
        context=pair.context,
    )
    assert not verify_function_preservation(broken)["passed"]


def test_clamp_projection_basics():
    t = np.array([-3.0, -0.5, 0.0, 0.5, 3.0])
    assert clamp_projection(t, 1.0).tolist() == [-1.0, -0.5, 0.0, 0.5, 1.0]
    r = np.array([0.25, 1.0, 2.0, 1.0, 0.25])
    assert clamp_projection(t, r).tolist() == [-0.25, -0.5, 0.0, 0.5, 0.25]


def test_measure_driven_factors_resolve_and_smooth():
    X, f = circle_complex(24)
    rng = np.random.default_rng(2)
    mu = EmpiricalMeasure.from_raw(
        X.coords + rng.normal(0, 0.03, X.coords.shape), np.ones(X.n_vertices)
    )
    for factor in (SmoothingFactor("dtm", 0.2), SmoothingFactor("kernel", 0.4)):
        r = factor.resolve(X, mu)
        assert np.all(r.values > 0)
        g = smooth_local(X, f, factor, mu)
        assert g.n_nodes >= 2
    with pytest.raises(ValidationError):
        SmoothingFactor("dtm", 0.2).resolve(X)  # needs the measure


def test_smoothing_factor_validation():
    with pytest.raises(ValidationError):
        SmoothingFactor("dtm", 1.5)
    with pytest.raises(ValidationError):
        SmoothingFactor("nope", 0.5)
    with pytest.raises(ValidationError):
        SmoothingFactor("kernel", -1.0)
    with pytest.raises(ValidationError):
        SmoothingFactor("constant", 1.0, scale=0.0)
