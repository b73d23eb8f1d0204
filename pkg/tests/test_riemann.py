from fractions import Fraction

import pytest

from weilgeom import linalg
from weilgeom.innerprod import NotPositiveDefinite, is_lsmall, lsmall_probe
from weilgeom.riemann import (Jet2Scalar, Metric, NotNilpotentError, christoffel, exp2,
                              harmonic_jet_basis, is_harmonic_jet, jet_of, laplace_beltrami_oracle,
                              laplacian, log2, lsymmetry_evidence, mirror, mirror_by_definition,
                              mirror_defect, nabla, verify_levicivita)
from weilgeom.weil import Jet1Element, Jet2Element, LapElement

F = Fraction


def generic(n, cls=Jet2Element, depth=None):
    if cls is Jet1Element:
        return [Jet1Element(0, [1 if i == k else 0 for i in range(n)], depth=depth) for k in range(n)]
    return [cls(0, [1 if i == k else 0 for i in range(n)]) for k in range(n)]


def test_metric_validation():
    with pytest.raises(ValueError):
        Metric.from_strings(["x", "y"], {(0, 0): "1", (1, 1): "1"})
    g = Metric.from_strings(["x", "y"], {(0, 0): "1", (0, 1): "x", (1, 1): "1"})
    with pytest.raises(NotPositiveDefinite):
        christoffel(g, (2, 0))


def test_christoffel_examples(flat2, hyperbolic, sphere):
    gd = christoffel(flat2, (F(1, 2), 3))
    assert all(c == 0 for k in gd.gamma for r in k for c in r)
    gd = christoffel(hyperbolic, (0, 1))
    # classical symbols, 0-based: Gamma^0_01 = -1, Gamma^1_00 = 1, Gamma^1_11 = -1
    assert gd.gamma[0][0][1] == gd.gamma[0][1][0] == -1
    assert gd.gamma[1][0][0] == 1 and gd.gamma[1][1][1] == -1
    assert gd.gamma[0][0][0] == gd.gamma[0][1][1] == gd.gamma[1][0][1] == 0
    gd = christoffel(sphere, (0, 0))
    assert all(c == 0 for k in gd.gamma for r in k for c in r)


def test_christoffel_matches_hand_formula_on_skew_metric(skew):
    x = (F(1, 3), F(1, 2))
    gd = christoffel(skew, x)
    g = [[2 + x[0] ** 2, x[0] * x[1]], [x[0] * x[1], 3 + x[1]]]
    # d_l g_ij by hand
    dg = [[[2 * x[0], x[1]], [x[1], 0]], [[0, x[0]], [x[0], 1]]]
    ginv = linalg.inverse(g)
    for k in range(2):
        for i in range(2):
            for j in range(2):
                want = F(1, 2) * sum(ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])
                                     for l in range(2))
                assert gd.gamma[k][i][j] == want


def test_nabla_axioms(hyperbolic):
    x = (F(1, 2), F(3, 2))
    gd = christoffel(hyperbolic, x)
    y = [xi + a for xi, a in zip(x, generic(2, Jet1Element, 1))]
    z = [xi + b for xi, b in zip(x, generic(2, Jet1Element, 2))]
    assert nabla(gd, x, z) == z
    assert nabla(gd, y, x) == y
    assert nabla(gd, y, z) == nabla(gd, z, y)


def test_flat_connection_is_affine(flat2):
    gd = christoffel(flat2, (1, 1))
    y, z = [F(2), F(3)], [F(5), F(-1)]
    assert nabla(gd, y, z) == [F(6), F(1)]


@pytest.mark.parametrize("which", ["flat2", "hyperbolic", "sphere", "skew"])
def test_exp_log_and_isometry(which, request):
    g = request.getfixturevalue(which)
    x = (F(1, 3), F(5, 4))
    gd = christoffel(g, x)
    u = generic(2)
    assert log2(gd, exp2(gd, u)) == u
    z = [xi + ui for xi, ui in zip(x, u)]
    assert exp2(gd, log2(gd, z)) == z
    w = log2(gd, z)
    assert gd.inner(w, w) == g.square_distance(x, z)
    assert exp2(gd, [0, 0]) == list(gd.point)


def test_flat_exp_log(flat2):
    gd = christoffel(flat2, (1, 2))
    u = generic(2)
    assert exp2(gd, u) == [1 + u[0], 2 + u[1]]
    z = exp2(gd, u)
    assert log2(gd, z) == u
    assert mirror(gd, z) == [2 * a - b for a, b in zip(gd.point, z)]


@pytest.mark.parametrize("which", ["hyperbolic", "sphere", "skew"])
def test_mirror_involution_and_definition(which, request):
    g = request.getfixturevalue(which)
    gd = christoffel(g, (0, 1) if which == "hyperbolic" else (F(1, 2), F(1, 3)))
    z = [xi + ui for xi, ui in zip(gd.point, generic(2))]
    assert mirror(gd, mirror(gd, z)) == z
    assert mirror(gd, z) == mirror_by_definition(gd, z)
    zl = exp2(gd, lsmall_probe(gd.inner_product()))
    assert mirror(gd, zl) == mirror_by_definition(gd, zl)


def test_log_rejects_non_neighbours(flat2):
    gd = christoffel(flat2, (0, 0))
    with pytest.raises(NotNilpotentError):
        log2(gd, [F(1), Jet2Element(0, [0, 1])])


def test_laplacian_examples(flat2, hyperbolic):
    assert laplacian("x^2 - y^2", flat2, (1, 2)) == 0
    assert laplacian("x^2 + y^2", flat2, (F(-1, 3), 7)) == 4
    assert laplacian("5", hyperbolic, (0, 1)) == 0
    val = laplacian("log(y)", hyperbolic, (0.0, 1.0))
    assert val == pytest.approx(-1.0, rel=1e-9)


def test_oracle_examples(flat2):
    assert laplace_beltrami_oracle("x^2 + y^2", flat2, (3, 4)) == 4
    assert laplace_beltrami_oracle("7/2", flat2, (3, 4)) == 0


@pytest.mark.parametrize("which,f", [
    ("hyperbolic", "x^2*y"), ("sphere", "x*y/(1 + x^2)"), ("skew", "x^3 - y^2*x"),
    ("sphere", "x^2 + y^2"), ("skew", "1/(1 + x^2 + y^2)"),
])
def test_laplacian_matches_oracle(which, f, request):
    g = request.getfixturevalue(which)
    for x in [(F(1, 3), F(1, 2)), (F(-2, 5), F(3, 4)), (F(1), F(1, 7))]:
        assert laplacian(f, g, x) == laplace_beltrami_oracle(f, g, x)


def test_mirror_defect_is_pure_sigma(hyperbolic):
    d = mirror_defect("x^3*y - y^2", hyperbolic, (F(1, 2), F(2)))
    assert isinstance(d, LapElement)
    assert d.value == 0 and all(c == 0 for c in d.grad)


def test_mirror_defect_vanishes_to_first_order(sphere):
    from weilgeom.expr import evaluate, parse
    x = (F(1, 2), F(-1, 3))
    gd = christoffel(sphere, x)
    z = [xi + a for xi, a in zip(x, generic(2, Jet1Element))]
    zp = mirror(gd, z)
    f = parse("x^3*y + y/(1 + x^2)", ["x", "y"])
    ev = lambda p: evaluate(f, {"x": p[0], "y": p[1]})  # noqa: E731
    assert ev(z) + ev(zp) - 2 * ev(x) == 0


def test_harmonic_jet_examples(flat2):
    x = (F(0), F(0))
    affine = Jet2Scalar.make(x, F(1), [F(2), F(-3)], [[0, 0], [0, 0]])
    assert is_harmonic_jet(affine, flat2) == (True, 0)
    tz = Jet2Scalar.make(x, F(0), [F(0), F(0)], [[F(1), F(0)], [F(0), F(-1)]])
    assert is_harmonic_jet(tz, flat2)[0]
    ok, c = is_harmonic_jet(Jet2Scalar.make(x, F(0), [F(0), F(0)], [[1, 0], [0, 1]]), flat2)
    assert not ok and c == 2


def test_flat_basis_is_the_classical_one(flat2):
    basis = harmonic_jet_basis(flat2, (0, 0))
    want = [jet_of(f, ["x", "y"], (0, 0)) for f in ("1", "x", "y", "2*x*y", "x^2 - y^2")]
    assert [(j.value, j.covector, j.form) for j in basis] == \
        [(j.value, j.covector, j.form) for j in want]


def test_basis_count_n3():
    g = Metric.diagonal(["x", "y", "z"], ["1 + z^2", "1", "2"])
    basis = harmonic_jet_basis(g, (1, 0, F(1, 2)))
    assert len(basis) == 9
    assert all(is_harmonic_jet(j, g)[0] for j in basis)


@pytest.mark.parametrize("which", ["hyperbolic", "sphere", "skew"])
def test_basis_jets_are_harmonic(which, request):
    g = request.getfixturevalue(which)
    x = (F(1, 2), F(2, 3))
    basis = harmonic_jet_basis(g, x)
    assert len(basis) == 5
    for j in basis:
        assert is_harmonic_jet(j, g) == (True, 0)


def test_converse_vanishing_on_l_neighbourhood(hyperbolic):
    x = (0, 1)
    gd = christoffel(hyperbolic, x)
    zl = exp2(gd, lsmall_probe(gd.inner_product()))
    for j in harmonic_jet_basis(hyperbolic, x):
        if j.label.startswith("tracezero"):
            assert j(zl) == 0


def test_levi_civita_sign_pinning(hyperbolic, sphere, skew):
    x = (F(1, 2), F(3, 2))
    for g in (hyperbolic, sphere, skew):
        assert verify_levicivita(g, x)[0]
    ok, diff = verify_levicivita(hyperbolic, x, flip_sign=True)
    assert not ok and diff != 0


def test_lsymmetry_evidence(flat2, hyperbolic, sphere, skew):
    for g in (flat2, hyperbolic, sphere, skew):
        assert lsymmetry_evidence(g, (F(1, 3), F(1, 2)))


def test_probe_log_is_lsmall(hyperbolic):
    gd = christoffel(hyperbolic, (F(1, 2), F(1, 2)))
    u = lsmall_probe(gd.inner_product())
    assert is_lsmall(log2(gd, exp2(gd, u)), gd.inner_product())
