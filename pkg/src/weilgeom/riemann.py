"""Metrics, the Levi-Civita connection, second-order exp/log, mirror images, the Laplacian.

Everything is local to one chart.  A point may have rational, float or
nilpotent (Weil-algebra valued) coordinates; derivatives of metric entries
come from jet evaluation, never from finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .expr import Ast, evaluate, parse
from .innerprod import (InnerProduct, elements_close, frame, is_lsmall, ldl, lsmall_probe,
                        tracezero_selfadjoint_basis)
from .scalars import DEFAULT_RTOL, EXACT, FLOAT64, is_exact
from .weil import Jet1Element, Jet2Element, scalar_part, sigma_coefficient


class NotNilpotentError(ValueError):
    """A point handed to ``log`` is not an infinitesimal neighbour of the base point."""


def point_mode(x: Sequence) -> str:
    return FLOAT64 if any(isinstance(scalar_part(c), float) for c in x) else EXACT


def _half(mode: str):
    return Fraction(1, 2) if mode == EXACT else 0.5


def _normalize_point(x: Sequence) -> tuple:
    return tuple(Fraction(c) if isinstance(c, int) else c for c in x)


@dataclass(frozen=True)
class Metric:
    """``g(x, z) = G(x; z - x, z - x)`` with ``G`` given entrywise by expressions."""

    coords: tuple[str, ...]
    entries: tuple[tuple[Ast, ...], ...]  # upper triangle, row i holds columns i..n-1

    @classmethod
    def from_strings(cls, coords: Sequence[str], upper: Mapping[tuple[int, int], str]) -> "Metric":
        """``upper`` maps 0-based ``(i, j)`` with ``i <= j`` to an expression."""
        coords = tuple(coords)
        n = len(coords)
        expected = {(i, j) for i in range(n) for j in range(i, n)}
        if set(upper) != expected:
            missing = sorted(expected - set(upper))
            extra = sorted(set(upper) - expected)
            raise ValueError(f"metric entries must cover the upper triangle; "
                             f"missing {missing}, unexpected {extra}")
        rows = tuple(tuple(parse(upper[i, j], coords) for j in range(i, n)) for i in range(n))
        return cls(coords, rows)

    @classmethod
    def diagonal(cls, coords: Sequence[str], diag: Sequence[str]) -> "Metric":
        n = len(coords)
        upper = {(i, j): (diag[i] if i == j else "0") for i in range(n) for j in range(i, n)}
        return cls.from_strings(coords, upper)

    @classmethod
    def euclidean(cls, coords: Sequence[str]) -> "Metric":
        return cls.diagonal(coords, ["1"] * len(coords))

    @property
    def n(self) -> int:
        return len(self.coords)

    def entry(self, i: int, j: int) -> Ast:
        if i > j:
            i, j = j, i
        return self.entries[i][j - i]

    def at(self, x: Sequence, mode: str | None = None) -> list[list]:
        """Matrix ``G(x)``; ``x`` may have nilpotent coordinates."""
        if len(x) != self.n:
            raise ValueError(f"point has {len(x)} coordinates, metric expects {self.n}")
        env = dict(zip(self.coords, x))
        mode = mode or point_mode(x)
        out = [[None] * self.n for _ in range(self.n)]
        for i in range(self.n):
            for j in range(i, self.n):
                out[i][j] = out[j][i] = evaluate(self.entries[i][j - i], env, mode)
        return out

    def inner_product(self, x: Sequence) -> InnerProduct:
        ip = InnerProduct(self.at(_normalize_point(x)))
        ldl(ip)  # raises NotPositiveDefinite
        return ip

    def square_distance(self, x: Sequence, z: Sequence):
        """``g(x, z) = G(x; z - x, z - x)``."""
        d = [b - a for a, b in zip(x, z)]
        return linalg.bilinear(self.at(x), d, d)


def _jet1_parts(e, n: int, depth: int):
    """Split an evaluation at an outer first-order jet point into value and gradient."""
    if isinstance(e, Jet1Element) and e.depth == depth:
        return e.value, list(e.grad)
    return e, [0] * n


def _jet1_point(x: Sequence) -> list[Jet1Element]:
    n = len(x)
    return [Jet1Element(x[k], [1 if i == k else 0 for i in range(n)]) for k in range(n)]


@dataclass(frozen=True)
class GammaData:
    """Christoffel symbols at a point, encoding ``nabla(x,y,z) = y - x + z + Gamma(x; y-x, z-x)``.

    ``gamma[k][i][j]`` are the classical symbols.  The bilinear map used by the
    connection is ``Gamma(x; u, v)^k = -sign * sum Gamma^k_ij u^i v^j``; ``sign`` is
    ``+1`` except when deliberately flipped for the sign-pinning check.
    """

    point: tuple
    gamma: tuple
    gram: tuple
    sign: int = 1
    mode: str = EXACT

    @property
    def n(self) -> int:
        return len(self.point)

    def bilinear(self, u: Sequence, v: Sequence) -> list:
        n = self.n
        out = []
        for k in range(n):
            total = 0
            for i in range(n):
                for j in range(n):
                    c = self.gamma[k][i][j]
                    if isinstance(c, (int, Fraction)) and c == 0:
                        continue
                    total = total + c * u[i] * v[j]
            out.append(-self.sign * total)
        return out

    def inner(self, u: Sequence, v: Sequence):
        return linalg.bilinear(self.gram, u, v)

    def inner_product(self) -> InnerProduct:
        return InnerProduct(self.gram)


def christoffel(g: Metric, x: Sequence, flip_sign: bool = False) -> GammaData:
    """``Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)`` via first-order jets."""
    x = _normalize_point(x)
    n = g.n
    if len(x) != n:
        raise ValueError(f"point has {len(x)} coordinates, metric expects {n}")
    mode = point_mode(x)
    xs = _jet1_point(x)
    gj = g.at(xs, mode)
    vals = [[None] * n for _ in range(n)]
    dg = [[[None] * n for _ in range(n)] for _ in range(n)]  # dg[l][i][j] = d_l g_ij
    for i in range(n):
        for j in range(n):
            v, grad = _jet1_parts(gj[i][j], n, xs[0].depth)
            vals[i][j] = v
            for l in range(n):
                dg[l][i][j] = grad[l]
    # positive-definiteness is a property of the base point
    ldl(InnerProduct([[scalar_part(c) for c in row] for row in vals]))
    ginv = linalg.inverse(vals)
    half = _half(mode)
    gamma = []
    for k in range(n):
        gk = []
        for i in range(n):
            row = []
            for j in range(n):
                s = 0
                for l in range(n):
                    t = dg[i][j][l] + dg[j][i][l] - dg[l][i][j]
                    if isinstance(t, (int, Fraction)) and t == 0:
                        continue
                    s = s + ginv[k][l] * t
                row.append(s * half)
            gk.append(tuple(row))
        gamma.append(tuple(gk))
    return GammaData(x, tuple(gamma), tuple(tuple(r) for r in vals),
                     -1 if flip_sign else 1, mode)


def _check_dims(gd: GammaData, *vecs: Sequence) -> None:
    for v in vecs:
        if len(v) != gd.n:
            raise ValueError(f"dimension mismatch: expected {gd.n} coordinates, got {len(v)}")


def nabla(gd: GammaData, y: Sequence, z: Sequence) -> list:
    """Complete the infinitesimal parallelogram ``x, y, z`` to ``nabla(x, y, z)``."""
    _check_dims(gd, y, z)
    x = gd.point
    a = [yi - xi for yi, xi in zip(y, x)]
    b = [zi - xi for zi, xi in zip(z, x)]
    corr = gd.bilinear(a, b)
    return [ai + zi + c for ai, zi, c in zip(a, z, corr)]


def exp2(gd: GammaData, u: Sequence) -> list:
    """``exp_x(u) = x + u + 1/2 Gamma(x; u, u)``."""
    _check_dims(gd, u)
    half = _half(gd.mode)
    corr = gd.bilinear(u, u)
    return [xi + ui + c * half for xi, ui, c in zip(gd.point, u, corr)]


def _displacement(gd: GammaData, z: Sequence, rtol: float) -> list:
    _check_dims(gd, z)
    v = [zi - xi for zi, xi in zip(z, gd.point)]
    for c in v:
        s = scalar_part(c)
        if (s != 0) if is_exact(s) else abs(s) > rtol:
            raise NotNilpotentError("point is not an infinitesimal neighbour of the base point")
    return v


def log2(gd: GammaData, z: Sequence, rtol: float = DEFAULT_RTOL) -> list:
    """``log_x(x + v) = v - 1/2 Gamma(x; v, v)``."""
    v = _displacement(gd, z, rtol)
    half = _half(gd.mode)
    corr = gd.bilinear(v, v)
    return [vi - c * half for vi, c in zip(v, corr)]


def mirror(gd: GammaData, z: Sequence, rtol: float = DEFAULT_RTOL) -> list:
    """Mirror image ``z' = x - v + Gamma(x; v, v)`` of ``z = x + v`` in ``x``."""
    v = _displacement(gd, z, rtol)
    corr = gd.bilinear(v, v)
    return [xi - vi + c for xi, vi, c in zip(gd.point, v, corr)]


def mirror_by_definition(gd: GammaData, z: Sequence, rtol: float = DEFAULT_RTOL) -> list:
    """``z' = exp_x(-log_x z)``; must agree with :func:`mirror`."""
    return exp2(gd, [-c for c in log2(gd, z, rtol)])


def _as_ast(f, coords) -> Ast:
    return parse(f, coords) if isinstance(f, str) else f


def mirror_defect(f, g: Metric, x: Sequence):
    """``f(z) + f(z') - 2 f(x)`` at ``z = exp_x(u)`` for the L-small probe ``u``.

    The result lives in the Laplace algebra and is a pure multiple of ``sigma``.
    """
    x = _normalize_point(x)
    f = _as_ast(f, g.coords)
    gd = christoffel(g, x)
    u = lsmall_probe(gd.inner_product())
    z = exp2(gd, u)
    zp = mirror(gd, z)
    mode = gd.mode
    ev = lambda p: evaluate(f, dict(zip(g.coords, p)), mode)  # noqa: E731
    return ev(z) + ev(zp) - 2 * ev(x)


def laplacian(f, g: Metric, x: Sequence):
    """``Delta f(x)`` as the sigma-coefficient of the mirror defect.

    Since ``g(x, z) = <u, u> = n sigma`` for the probe, the defining relation
    ``f(z) + f(z') - 2 f(x) = (Delta f(x) / n) g(x, z)`` makes the sigma-coefficient
    equal to ``Delta f(x)`` itself; no other factor of ``n`` appears anywhere.
    """
    return sigma_coefficient(mirror_defect(f, g, x))


def laplace_beltrami_oracle(f, g: Metric, x: Sequence):
    """Classical ``(1/sqrt|g|) d_i (sqrt|g| g^ij d_j f)``.

    Written as ``d_i(g^ij d_j f) + 1/2 (d_i det g / det g) g^ij d_j f`` so it
    stays rational; uses no connection and no L-probe.
    """
    x = _normalize_point(x)
    n = g.n
    f = _as_ast(f, g.coords)
    mode = point_mode(x)
    env2 = {c: Jet2Element.variable(x[k], k, n) for k, c in enumerate(g.coords)}
    fj = evaluate(f, env2, mode)
    if isinstance(fj, Jet2Element):
        fgrad, fhess = fj.grad, fj.hess
    else:
        fgrad, fhess = [0] * n, [[0] * n for _ in range(n)]
    xs = _jet1_point(x)
    gj = [[Jet1Element(*_jet1_parts(e, n, xs[0].depth)) for e in row] for row in g.at(xs, mode)]
    ginv = linalg.inverse(gj)
    dete = linalg.det(gj)
    if not isinstance(dete, Jet1Element):
        dete = Jet1Element(dete, [0] * n)
    df = [Jet1Element(fgrad[j], [fhess[l][j] for l in range(n)]) for j in range(n)]
    half = _half(mode)
    total = 0
    for i in range(n):
        w = sum((ginv[i][j] * df[j] for j in range(n)), 0)
        if not isinstance(w, Jet1Element):
            continue
        total = total + w.grad[i] + half * w.value * dete.grad[i] / dete.value
    return total


# -- harmonic 2-jets -------------------------------------------------------

@dataclass(frozen=True)
class Jet2Scalar:
    """The 2-jet ``z -> value + p.(z - x) + 1/2 (z - x)^T H (z - x)`` at ``x``."""

    point: tuple
    value: object
    covector: tuple
    form: tuple
    label: str = field(default="", compare=False)

    def __post_init__(self):
        n = len(self.point)
        if len(self.covector) != n or len(self.form) != n or any(len(r) != n for r in self.form):
            raise ValueError("jet data does not match the base point dimension")
        if any(self.form[i][j] != self.form[j][i] for i in range(n) for j in range(i)):
            raise ValueError("jet form must be symmetric")

    @classmethod
    def make(cls, point, value, covector, form, label: str = "") -> "Jet2Scalar":
        return cls(tuple(point), value, tuple(covector), tuple(tuple(r) for r in form), label)

    def __call__(self, z: Sequence):
        d = [zi - xi for zi, xi in zip(z, self.point)]
        half = _half(point_mode(self.point))
        return self.value + linalg.dot(self.covector, d) + half * linalg.bilinear(self.form, d, d)

    def norm(self) -> float:
        vals = [self.value, *self.covector, *(h for r in self.form for h in r)]
        return max(abs(float(v)) for v in vals)


def jet_of(f, coords: Sequence[str], x: Sequence, label: str = "") -> Jet2Scalar:
    """The 2-jet of the expression ``f`` at ``x``."""
    x = _normalize_point(x)
    n = len(coords)
    f = _as_ast(f, coords)
    env = {c: Jet2Element.variable(x[k], k, n) for k, c in enumerate(coords)}
    e = evaluate(f, env, point_mode(x))
    if not isinstance(e, Jet2Element):
        e = Jet2Element(e, [0] * n)
    return Jet2Scalar.make(x, e.value, e.grad, e.hess, label)


def harmonic_certificate(j: Jet2Scalar, g: Metric):
    """Sigma-coefficient of ``j(z) + j(z') - 2 j(x)`` over the L-small probe."""
    gd = christoffel(g, j.point)
    u = lsmall_probe(gd.inner_product())
    z = exp2(gd, u)
    zp = mirror(gd, z)
    return sigma_coefficient(j(z) + j(zp) - 2 * j(gd.point))


def is_harmonic_jet(j: Jet2Scalar, g: Metric, x: Sequence | None = None,
                    rtol: float = DEFAULT_RTOL) -> tuple[bool, object]:
    """``(verdict, c)``: harmonic iff the certificate ``c`` vanishes."""
    if x is not None and _normalize_point(x) != j.point:
        raise ValueError("jet is not based at the given point")
    c = harmonic_certificate(j, g)
    if is_exact(c):
        return c == 0, c
    return abs(c) <= rtol * (1 + j.norm()), c


def harmonic_jet_basis(g: Metric, x: Sequence) -> list[Jet2Scalar]:
    """Constants, ``p o log_x`` and ``q o log_x`` with ``q`` quadratic of trace zero.

    With a representable orthonormal frame ``S`` (rows = dual basis) the linear
    maps are its rows and ``q(w) = (S w)^T C (S w)`` for the trace-zero basis
    ``C``.  Otherwise (irrational frame in exact mode) the same spaces are spanned
    by coordinate covectors and by symmetric ``B`` with ``trace(G^{-1} B) = 0``.
    """
    gd = christoffel(g, x)
    n = gd.n
    mode = gd.mode
    one = Fraction(1) if mode == EXACT else 1.0
    zero = one * 0
    pt = gd.point
    zeros_n = [zero] * n
    zero_form = [[zero] * n for _ in range(n)]
    basis = [Jet2Scalar.make(pt, one, zeros_n, zero_form, "constant")]
    s = frame(gd.inner_product())
    covectors = s if s is not None else linalg.identity(n)
    # H_ij = -p . Gamma(x; e_i, e_j), from p(log_x(x + v)) = p.v - 1/2 p.Gamma(v, v)
    e = linalg.identity(n)
    gam = [[gd.bilinear(e[i], e[j]) for j in range(n)] for i in range(n)]
    for k, p in enumerate(covectors):
        p = [one * c for c in p]
        h = [[-linalg.dot(p, gam[i][j]) for j in range(n)] for i in range(n)]
        basis.append(Jet2Scalar.make(pt, zero, p, h, f"linear[{k}]"))
    if n < 2:
        return basis
    if s is not None:
        forms = [linalg.matmul(linalg.matmul(linalg.transpose(s), c), s)
                 for c in tracezero_selfadjoint_basis(n)]
    else:
        forms = _tracezero_forms(gd.inner_product().inverse())
    for k, b in enumerate(forms):
        # q(log_x z) = v^T B v + O(v^3), i.e. Hessian 2B
        h = [[2 * one * b[i][j] for j in range(n)] for i in range(n)]
        basis.append(Jet2Scalar.make(pt, zero, zeros_n, h, f"tracezero[{k}]"))
    return basis


def _tracezero_forms(ginv: Sequence[Sequence]) -> list[list[list]]:
    n = len(ginv)
    sym = []
    for i in range(n):
        for j in range(i, n):
            m = [[0] * n for _ in range(n)]
            m[i][j] = m[j][i] = 1
            sym.append(m)
    trace = lambda m: sum(ginv[i][j] * m[i][j] for i in range(n) for j in range(n))  # noqa: E731
    pivot = sym[0]
    tp = trace(pivot)
    out = []
    for m in sym[1:]:
        c = trace(m) / tp
        out.append([[m[i][j] - c * pivot[i][j] for j in range(n)] for i in range(n)])
    return out


# -- structural checks ----------------------------------------------------

def _nested_generators(n: int, level: int) -> list[Jet1Element]:
    return [Jet1Element(0, [1 if i == k else 0 for i in range(n)], depth=level) for k in range(n)]


def verify_levicivita(g: Metric, x: Sequence, flip_sign: bool = False,
                      rtol: float = DEFAULT_RTOL) -> tuple[bool, object]:
    """Check ``g(nabla(x,y,z), nabla(x,y,u)) = g(z, u)`` for generic first-order
    neighbours ``y, z, u`` of ``x`` (three independent layers of dual numbers).

    Returns ``(holds, lhs - rhs)``.
    """
    x = _normalize_point(x)
    n = g.n
    gd = christoffel(g, x, flip_sign=flip_sign)
    a, b, c = (_nested_generators(n, lvl) for lvl in (1, 2, 3))
    y = [xi + ai for xi, ai in zip(x, a)]
    z = [xi + bi for xi, bi in zip(x, b)]
    u = [xi + ci for xi, ci in zip(x, c)]
    p = nabla(gd, y, z)
    q = nabla(gd, y, u)
    lhs = g.square_distance(p, q)
    rhs = g.square_distance(z, u)
    return elements_close(lhs, rhs, rtol), lhs - rhs


def lsymmetry_evidence(g: Metric, x: Sequence, rtol: float = DEFAULT_RTOL) -> bool:
    """For ``z = exp_x(u)`` with ``u`` the L-probe, test that ``log_z(x)`` is L-small
    for the inner product ``G(z)``, with ``Gamma`` and ``G`` evaluated at the
    nilpotent point ``z``.  Evidence for symmetry of the L-neighbour relation.
    """
    x = _normalize_point(x)
    gd = christoffel(g, x)
    u = lsmall_probe(gd.inner_product())
    z = exp2(gd, u)
    gdz = christoffel(g, z)
    w = log2(gdz, x, rtol)
    return is_lsmall(w, InnerProduct(gdz.gram), rtol)
