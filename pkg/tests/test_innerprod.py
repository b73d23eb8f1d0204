import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from weilgeom import linalg
from weilgeom.innerprod import (InnerProduct, NotPositiveDefinite, RankDeficientError, cholesky,
                                is_lsmall, lsmall_probe, lsmall_residuals, preserves_lsmall,
                                semiconformal_matrix, sum_lsmall_condition,
                                tracezero_selfadjoint_basis)
from weilgeom.scalars import ExactModeError
from weilgeom.suite import random_semiconformal, random_spd, random_upper
from weilgeom.weil import LapElement

F = Fraction


def ip(rows):
    return InnerProduct([[F(x) for x in r] for r in rows])


def test_cholesky_examples():
    assert cholesky(ip([[1, 0], [0, 1]])) == [[1, 0], [0, 1]]
    assert cholesky(ip([[4, 0], [0, 9]])) == [[2, 0], [0, 3]]
    with pytest.raises(NotPositiveDefinite):
        cholesky(ip([[1, 2], [2, 1]]))


def test_cholesky_reproduces_gram():
    rng = random.Random(3)
    for _ in range(20):
        s = random_upper(rng, 3)
        g = ip(linalg.matmul(linalg.transpose(s), s))
        r = cholesky(g)
        assert linalg.matmul(linalg.transpose(r), r) == [list(row) for row in g.gram]
        assert all(r[i][i] > 0 for i in range(3))


def test_irrational_frame_needs_float_mode():
    with pytest.raises(ExactModeError):
        cholesky(ip([[2, 0], [0, 1]]))
    s = cholesky(InnerProduct([[2.0, 0.0], [0.0, 1.0]]))
    assert s[0][0] == pytest.approx(2 ** 0.5)


def test_gram_must_be_symmetric():
    with pytest.raises(ValueError):
        InnerProduct([[1, 2], [3, 4]])


def test_probe_identity_examples():
    u = lsmall_probe(ip([[1, 0], [0, 1]]))
    assert u == [LapElement(0, [1, 0]), LapElement(0, [0, 1])]
    g3 = ip([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    u3 = lsmall_probe(g3)
    assert g3.inner(u3, u3) == LapElement(0, [0, 0, 0], 3)
    g = ip([[4, 0], [0, 9]])
    res = lsmall_residuals(lsmall_probe(g), g)
    assert all(lhs == rhs for _, _, lhs, rhs in res)


def test_probe_needs_two_dimensions():
    with pytest.raises(ValueError):
        lsmall_probe(ip([[1]]))


@given(st.integers(2, 4), st.integers(0, 10 ** 6))
def test_probe_identity_random_spd(n, seed):
    g = random_spd(random.Random(seed), n)
    u = lsmall_probe(g)
    assert is_lsmall(u, g)
    assert g.inner(u, u).sigma == n
    assert all(lhs == rhs for _, _, lhs, rhs in lsmall_residuals(u, g))


def test_sum_condition_examples():
    g = ip([[1, 0], [0, 1]])
    u = lsmall_probe(g)
    zero = [0, 0]
    assert sum_lsmall_condition(u, zero, g)
    assert sum_lsmall_condition(u, u, g)
    d1 = LapElement(0, [1, 0])
    # <a,e1><b,e2> + <a,e2><b,e1> = d1^2 = sigma, while <a,b> = 0
    assert not sum_lsmall_condition([d1, 0], [0, d1], g)
    with pytest.raises(ValueError):
        sum_lsmall_condition([d1], [d1, 0], g)


def test_tracezero_basis():
    assert tracezero_selfadjoint_basis(2) == [[[0, 1], [1, 0]], [[1, 0], [0, -1]]]
    b3 = tracezero_selfadjoint_basis(3)
    assert len(b3) == 5
    assert linalg.exact_rank([[x for r in m for x in r] for m in b3]) == 5
    for n in (2, 3, 4):
        g = ip(linalg.identity(n))
        u = lsmall_probe(g)
        for c in tracezero_selfadjoint_basis(n):
            assert all(c[i][j] == c[j][i] for i in range(n) for j in range(n))
            assert sum(c[i][i] for i in range(n)) == 0
            assert g.inner(linalg.matvec(c, u), u) == 0
    with pytest.raises(ValueError):
        tracezero_selfadjoint_basis(1)


@given(st.integers(2, 4), st.integers(0, 10 ** 6))
def test_nonzero_trace_is_detected(n, seed):
    rng = random.Random(seed)
    g = ip(linalg.identity(n))
    u = lsmall_probe(g)
    c = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            c[i][j] = c[j][i] = F(rng.randint(-5, 5))
    tr = sum(c[i][i] for i in range(n))
    assert g.inner(linalg.matvec(c, u), u) == LapElement(0, [0] * n, tr)


def test_semiconformal_examples():
    eye = ip([[1, 0], [0, 1]])
    r = semiconformal_matrix([[3, 4], [4, -3]], eye, eye)
    assert r.is_semiconformal and r.dilation == 25 and r.worst_defect == 0
    assert semiconformal_matrix([[1, 0], [0, 1]], eye, eye).dilation == 1
    r = semiconformal_matrix([[1, 0], [0, 2]], eye, eye)
    assert not r.is_semiconformal and r.dilation is None and r.worst_defect == 3


def test_semiconformal_rank_deficiency():
    eye = ip([[1, 0], [0, 1]])
    with pytest.raises(RankDeficientError):
        semiconformal_matrix([[1, 2], [2, 4]], eye, eye)
    with pytest.raises(RankDeficientError):
        semiconformal_matrix([[1, 0], [0, 1], [1, 1]], eye, ip(linalg.identity(3)))


def test_semiconformal_with_irrational_codomain_frame_stays_exact():
    dom = ip([[1, 0], [0, 1]])
    cod = ip([[2, 0], [0, 2]])
    r = semiconformal_matrix([[1, 0], [0, 1]], dom, cod)
    assert r.is_semiconformal and r.dilation == 2
    r = semiconformal_matrix([[1, 1], [0, 1]], dom, ip([[2, 1], [1, 3]]))
    assert not r.is_semiconformal


@given(st.integers(0, 10 ** 6))
def test_matrix_and_probe_routes_agree(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    m = rng.randint(2, n)
    sd, sc = random_upper(rng, n), random_upper(rng, m)
    dom = ip(linalg.matmul(linalg.transpose(sd), sd))
    cod = ip(linalg.matmul(linalg.transpose(sc), sc))
    a = random_semiconformal(rng, m, n, sd, sc)
    if rng.random() < 0.5:
        i, j = rng.randrange(m), rng.randrange(n)
        a[i][j] += F(rng.randint(1, 3), rng.randint(1, 3))
    if linalg.rank(a) < m:
        return
    r = semiconformal_matrix(a, dom, cod)
    assert r.is_semiconformal == preserves_lsmall(a, dom, cod)
    if r.is_semiconformal:
        u = lsmall_probe(dom)
        au = linalg.matvec(a, u)
        assert F(1, m) * cod.inner(au, au) == r.dilation * F(1, n) * dom.inner(u, u)


def test_float_mode_semiconformal():
    eye = InnerProduct([[1.0, 0.0], [0.0, 1.0]])
    r = semiconformal_matrix([[3.0, 4.0], [4.0, -3.0]], eye, eye)
    assert r.is_semiconformal and r.dilation == pytest.approx(25.0)
    assert r.to_json()["dilation"] == "25.0"
