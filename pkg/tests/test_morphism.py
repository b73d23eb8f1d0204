import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from weilgeom import linalg
from weilgeom.innerprod import InnerProduct, lsmall_probe, preserves_lsmall
from weilgeom.morphism import (TENSION_NORMALIZATION, NotSubmersionError, SmoothMap, check_point,
                               classical_tension, differential, fuglede_ishihara_check,
                               is_pure_sigma, is_semiconformal_at, lsmall_preserved_with_quadratic,
                               map_jet, pullback, tension, tension_defect)
from weilgeom.riemann import Metric, harmonic_jet_basis, jet_of
from weilgeom.suite import corpus_manifest, corpus_names, random_semiconformal, random_upper

F = Fraction
E2 = Metric.euclidean(["u", "v"])
SQUARE = SmoothMap.from_strings(["x", "y"], ["x^2 - y^2", "2*x*y"])


def test_differential_example():
    assert differential(SQUARE, (1, 2)) == [[2, -4], [4, 2]]


def test_differential_of_constant_component():
    phi = SmoothMap.from_strings(["x", "y"], ["3", "x"])
    assert differential(phi, (1, 1)) == [[0, 0], [1, 0]]


def test_map_jet_example():
    j = map_jet(SQUARE, (1, 2))
    assert j.value == (-3, 4)
    assert j.hessians == (((2, 0), (0, -2)), ((0, 2), (2, 0)))


def test_semiconformal_examples(flat2):
    r = is_semiconformal_at(SQUARE, flat2, E2, (1, 2))
    assert r.is_semiconformal and r.dilation == 20 and r.probe_verdict is True
    stretch = SmoothMap.from_strings(["x", "y"], ["x", "2*y"])
    r = is_semiconformal_at(stretch, flat2, E2, (1, 2))
    assert not r.is_semiconformal and r.probe_verdict is False
    line = SmoothMap.from_strings(["x", "y"], ["x + y"])
    r = is_semiconformal_at(line, flat2, Metric.euclidean(["t"]), (F(1, 3), 5))
    assert r.is_semiconformal and r.dilation == 2 and r.probe_verdict


def test_not_a_submersion(flat2):
    with pytest.raises(NotSubmersionError):
        is_semiconformal_at(SQUARE, flat2, E2, (0, 0))
    with pytest.raises(NotSubmersionError):
        check_point(SQUARE, flat2, E2, (0, 0))


def test_tension_examples(flat2):
    assert tension(SQUARE, flat2, E2, (1, 2)) == [0, 0]
    quad = SmoothMap.from_strings(["x", "y"], ["x^2 + y^2", "y"])
    assert tension(quad, flat2, E2, (1, 1)) == [4, 0]
    assert all(is_pure_sigma(e) for e in tension_defect(quad, flat2, E2, (1, 1)))
    assert TENSION_NORMALIZATION == 1


@pytest.mark.parametrize("which", ["hyperbolic", "sphere", "skew"])
def test_tension_matches_classical_formula(which, request):
    g = request.getfixturevalue(which)
    cases = [(["x^2*y", "y + x^3"], request.getfixturevalue("sphere")),
             (["x*y", "1 + y^2"], request.getfixturevalue("skew")),
             (["x + y^2"], Metric.diagonal(["t"], ["1 + t^2"]))]
    for comps, h in cases:
        phi = SmoothMap.from_strings(["x", "y"], comps)
        for x in [(F(1, 2), F(3, 4)), (F(-1, 3), F(2))]:
            t = tension(phi, g, h, x)
            assert t == [TENSION_NORMALIZATION * c for c in classical_tension(phi, g, h, x)]


def test_check_point_examples(flat2):
    r = check_point(SQUARE, flat2, E2, (1, 2), fi=True)
    assert r.harmonic_morphism and r.fi.direct and r.fi.pullback and r.fi_agreement
    assert r.to_json()["semiconformal"]["dilation"] == "20/1"
    stretch = SmoothMap.from_strings(["x", "y"], ["x", "2*y"])
    r = check_point(stretch, flat2, E2, (1, 2), fi=True)
    assert r.harmonic and not r.harmonic_morphism
    assert r.fi.agree and r.fi.failing == ("tracezero[1]",)
    assert r.fi.certificates["tracezero[1]"] == -6


def test_projection_passes_pullback(flat2):
    proj = SmoothMap.from_strings(["x", "y"], ["x"])
    fi = fuglede_ishihara_check(proj, flat2, Metric.euclidean(["t"]), (3, 4))
    assert fi.direct and fi.pullback and not fi.failing


def test_pullback_matches_composition(flat2):
    x = (F(1, 2), F(-1, 3))
    jet = map_jet(SQUARE, x)
    for j in harmonic_jet_basis(E2, list(jet.value)):
        pb = pullback(j, jet)
        # compose the polynomial jet with the map and re-jet at x
        v0 = jet.value
        d = [f"(({c}) - ({v0[k]}))" for k, c in enumerate(["x^2 - y^2", "2*x*y"])]
        poly = f"{j.value}"
        for a in range(2):
            poly += f" + ({j.covector[a]})*{d[a]}"
            for b in range(2):
                poly += f" + ({j.form[a][b]}/2)*{d[a]}*{d[b]}"
        ref = jet_of(poly, ["x", "y"], x)
        assert (pb.value, pb.covector, pb.form) == (ref.value, ref.covector, ref.form)


def test_pullback_rejects_wrong_base(flat2):
    jet = map_jet(SQUARE, (1, 2))
    j = harmonic_jet_basis(E2, (0, 0))[1]
    with pytest.raises(ValueError):
        pullback(j, jet)


MAP_MANIFESTS = [n for n in corpus_names() if corpus_manifest(n).map is not None]


@pytest.mark.parametrize("name", MAP_MANIFESTS)
def test_corpus_routes_agree(name):
    m = corpus_manifest(name)
    for _, p in m.points_in():
        try:
            r = check_point(m.map, m.domain.metric, m.codomain.metric, p, fi=True, rtol=m.tol)
        except NotSubmersionError:
            continue
        assert r.fi.agree, (name, p)
        assert r.semiconformal.probe_verdict == r.semiconformal.is_semiconformal
        if all(isinstance(t, Fraction) for t in r.tension):
            assert list(r.tension) == classical_tension(m.map, m.domain.metric,
                                                        m.codomain.metric, p)


def test_hopf_dilation():
    m = corpus_manifest("hopf.ini")
    _, p = m.points_in()[0]
    r = check_point(m.map, m.domain.metric, m.codomain.metric, p)
    assert r.harmonic_morphism
    assert r.semiconformal.dilation == 4 * sum(c * c for c in p)


@given(st.integers(0, 10 ** 6))
def test_quadratic_perturbation_does_not_matter(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    m = rng.randint(1, n)
    sd, sc = random_upper(rng, n), random_upper(rng, m)
    dom = InnerProduct(linalg.matmul(linalg.transpose(sd), sd))
    cod = InnerProduct(linalg.matmul(linalg.transpose(sc), sc))
    a = random_semiconformal(rng, m, n, sd, sc)
    if rng.random() < 0.5:
        a[rng.randrange(m)][rng.randrange(n)] += 1
    verdict = preserves_lsmall(a, dom, cod)
    for _ in range(20):
        quad = []
        for _ in range(m):
            q = [[F(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    q[i][j] = q[j][i] = F(rng.randint(-9, 9), rng.randint(1, 5))
            quad.append(q)
        assert lsmall_preserved_with_quadratic(a, quad, dom, cod) == verdict


def test_smooth_map_validation():
    with pytest.raises(ValueError):
        SmoothMap.from_strings(["x"], [])
    with pytest.raises(ValueError):
        SQUARE((1,))
    assert SQUARE((F(1), F(2))) == [-3, 4]


def test_float_mode_check_point(flat2):
    r = check_point(SQUARE, flat2, E2, (1.0, 2.0), fi=True)
    assert r.harmonic_morphism and r.fi.agree
    assert float(r.semiconformal.dilation) == pytest.approx(20.0)
    u = lsmall_probe(InnerProduct([[1.0, 0.0], [0.0, 1.0]]))
    assert len(u) == 2
