"""Inner-product spaces: orthonormal frames, L-small vectors, semi-conformal matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .scalars import DEFAULT_RTOL, ExactModeError, exact_sqrt, format_scalar, is_exact
from .weil import LapElement, WeilElement, scalar_part


class NotPositiveDefinite(ValueError):
    pass


class RankDeficientError(ValueError):
    pass


@dataclass(frozen=True)
class InnerProduct:
    gram: tuple

    def __init__(self, gram: Sequence[Sequence]):
        g = tuple(tuple(row) for row in gram)
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square and non-empty")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def exact(self) -> bool:
        return all(is_exact(scalar_part(x)) for row in self.gram for x in row)

    def inner(self, u: Sequence, v: Sequence):
        return linalg.bilinear(self.gram, u, v)

    def inverse(self) -> list[list]:
        return linalg.inverse([[Fraction(x) if isinstance(x, int) else x for x in row] for row in self.gram])


@dataclass(frozen=True)
class SemiConformalReport:
    is_semiconformal: bool
    dilation: object | None
    worst_defect: object
    probe_verdict: bool | None = None

    def to_json(self) -> dict:
        out = {
            "is_semiconformal": self.is_semiconformal,
            "dilation": None if self.dilation is None else format_scalar(self.dilation),
            "worst_defect": format_scalar(self.worst_defect),
        }
        if self.probe_verdict is not None:
            out["probe_verdict"] = self.probe_verdict
        return out


def ldl(ip: InnerProduct) -> tuple[list[list], list]:
    """Square-root-free Cholesky ``gram = L diag(d) L^T`` with unit lower ``L``."""
    n = ip.dim
    g = [[Fraction(x) if is_exact(x) else x for x in row] for row in ip.gram]
    low = linalg.identity(n)
    d = [0] * n
    for j in range(n):
        d[j] = g[j][j] - sum((low[j][k] ** 2 * d[k] for k in range(j)), 0)
        if d[j] <= 0:
            raise NotPositiveDefinite(f"leading minor {j + 1} is not positive")
        for i in range(j + 1, n):
            low[i][j] = (g[i][j] - sum((low[i][k] * low[j][k] * d[k] for k in range(j)), 0)) / d[j]
    return low, d


def cholesky(ip: InnerProduct) -> list[list]:
    """Upper-triangular ``S`` with positive diagonal and ``S^T S = gram``.

    In exact mode this succeeds only when every pivot is a rational square;
    otherwise ``ExactModeError`` is raised (see :func:`frame`).
    """
    low, d = ldl(ip)
    n = ip.dim
    roots = []
    for x in d:
        if is_exact(x):
            r = exact_sqrt(x)
            if r is None:
                raise ExactModeError(
                    f"pivot {format_scalar(x)} has no rational square root; "
                    "use float64 mode or the square-root-free ldl()")
            roots.append(r)
        else:
            roots.append(math.sqrt(x))
    return [[roots[i] * low[j][i] if j >= i else 0 for j in range(n)] for i in range(n)]


def frame(ip: InnerProduct) -> list[list] | None:
    """The Cholesky factor when it is representable in the current mode."""
    try:
        return cholesky(ip)
    except ExactModeError:
        return None


def lsmall_probe(ip: InnerProduct) -> list[LapElement]:
    """The generic L-small vector ``u = S^{-1} d`` of ``ip``, coordinates in ``Lap(n)``.

    When ``S`` is irrational (exact mode) the same vector is returned in the
    intrinsic generators ``u_i = x_i`` with relations ``x_i x_j = (G^{-1})_ij sigma``,
    which is the subalgebra generated by ``S^{-1} d`` written in its own basis.
    Either way ``<u,u> = n sigma``.
    """
    n = ip.dim
    if n < 2:
        raise ValueError("L-small probes need dimension >= 2")
    s = frame(ip)
    if s is None:
        form = ip.inverse()
        return [LapElement.generator(i, n, form) for i in range(n)]
    f = linalg.inverse(s)
    return [LapElement(0, f[i], 0) for i in range(n)]


def _flat_coeffs(x) -> list:
    if isinstance(x, WeilElement):
        out = []
        for c in x._coeffs():
            out.extend(_flat_coeffs(c))
        return out
    return [x]


def elements_close(a, b, rtol: float = DEFAULT_RTOL) -> bool:
    """Exact equality, or coefficientwise agreement to ``rtol`` for floats."""
    diff = a - b
    coeffs = _flat_coeffs(diff)
    if all(is_exact(c) for c in coeffs):
        return all(c == 0 for c in coeffs)
    scale = max([1.0] + [abs(float(c)) for c in _flat_coeffs(a) + _flat_coeffs(b)])
    return all(abs(float(c)) <= rtol * scale for c in coeffs)



def lsmall_residuals(vec: Sequence, ip: InnerProduct) -> list[tuple[int, int, object, object]]:
    """``(i, j, lhs, rhs)`` of ``<a,e_i><a,e_j> = (1/n)<a,a><e_i,e_j>`` for ``i <= j``."""
    n = ip.dim
    if len(vec) != n:
        raise ValueError(f"vector has {len(vec)} coordinates, inner product has dimension {n}")
    frac = Fraction(1, n) if ip.exact else 1.0 / n
    gv = linalg.matvec(ip.gram, vec)  # <a, e_i> = (G a)_i
    norm = ip.inner(vec, vec)
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append((i, j, gv[i] * gv[j], norm * ip.gram[i][j] * frac))
    return out


def is_lsmall(vec: Sequence, ip: InnerProduct, rtol: float = DEFAULT_RTOL) -> bool:
    if ip.dim == 1:
        return True
    return all(elements_close(lhs, rhs, rtol) for _, _, lhs, rhs in lsmall_residuals(vec, ip))


def sum_lsmall_condition(a: Sequence, b: Sequence, ip: InnerProduct,
                         rtol: float = DEFAULT_RTOL) -> bool:
    """``<a,u><b,v> + <a,v><b,u> = (2/n)<a,b><u,v>`` for all basis pairs ``u, v``."""
    n = ip.dim
    if len(a) != n or len(b) != n:
        raise ValueError("dimension mismatch")
    frac = Fraction(2, n) if ip.exact else 2.0 / n
    ga, gb = linalg.matvec(ip.gram, a), linalg.matvec(ip.gram, b)
    ab = ip.inner(a, b)
    for i in range(n):
        for j in range(i, n):
            lhs = ga[i] * gb[j] + ga[j] * gb[i]
            rhs = ab * ip.gram[i][j] * frac
            if not elements_close(lhs, rhs, rtol):
                return False
    return True


def tracezero_selfadjoint_basis(n: int) -> list[list[list[int]]]:
    """``E_ij + E_ji`` (i < j) followed by ``E_ii - E_{i+1,i+1}``."""
    if n < 2:
        raise ValueError("trace-zero basis needs n >= 2")
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            m = [[0] * n for _ in range(n)]
            m[i][j] = m[j][i] = 1
            out.append(m)
    for i in range(n - 1):
        m = [[0] * n for _ in range(n)]
        m[i][i], m[i + 1][i + 1] = 1, -1
        out.append(m)
    return out


def _check_full_row_rank(a: Sequence[Sequence], rtol: float) -> tuple[int, int]:
    m = len(a)
    n = len(a[0]) if m else 0
    if m == 0 or any(len(row) != n for row in a):
        raise ValueError("matrix must be non-empty and rectangular")
    if m > n:
        raise RankDeficientError(f"{m}x{n} matrix cannot have full row rank")
    r = linalg.rank(a, rtol)
    if r < m:
        raise RankDeficientError(f"rank {r} < {m}: not a surjective linear map")
    return m, n


def row_gram(a: Sequence[Sequence], ip_dom: InnerProduct) -> list[list]:
    """``A G^{-1} A^T``: the Gram matrix of the rows of ``A`` in the dual metric."""
    return linalg.matmul(linalg.matmul(a, ip_dom.inverse()), linalg.transpose(a))


def semiconformal_matrix(a: Sequence[Sequence], ip_dom: InnerProduct, ip_cod: InnerProduct,
                         rtol: float = DEFAULT_RTOL) -> SemiConformalReport:
    """Classify ``A`` via ``B = S_cod A S_dom^{-1}``, its matrix in orthonormal frames.

    Only ``B B^T = S_cod (A G^{-1} A^T) S_cod^T`` is needed, so the domain frame
    never has to be formed.  In exact mode with an irrational codomain frame the
    verdict and the dilation stay exact (they only involve ``d_i K_ii`` and the
    vanishing of ``K_ij`` below), while off-diagonal defects may be irrational and
    are then reported as floats.
    """
    m, n = _check_full_row_rank(a, rtol)
    if ip_dom.dim != n or ip_cod.dim != m:
        raise ValueError("inner-product dimensions do not match the matrix shape")
    exact = ip_dom.exact and ip_cod.exact and all(is_exact(x) for row in a for x in row)
    if exact:
        a = [[Fraction(x) for x in row] for row in a]
    k = row_gram(a, ip_dom)
    low, d = ldl(ip_cod)
    # B B^T = D^{1/2} (L^T K L) D^{1/2}
    kk = linalg.matmul(linalg.matmul(linalg.transpose(low), k), low)
    norms = [d[i] * kk[i][i] for i in range(m)]
    off = []
    for i in range(m):
        for j in range(i + 1, m):
            sq = d[i] * d[j] * kk[i][j] ** 2
            if exact:
                r = exact_sqrt(sq)
                off.append(r if r is not None else math.sqrt(sq))
            else:
                off.append(math.sqrt(sq))
    defects = [abs(norms[i] - norms[j]) for i in range(m) for j in range(i + 1, m)] + off
    worst = max(defects, default=Fraction(0) if exact else 0.0)
    if exact:
        ok = all(kk[i][j] == 0 for i in range(m) for j in range(i + 1, m)) and \
            all(x == norms[0] for x in norms) and norms[0] > 0
    else:
        scale = max(abs(x) for x in norms)
        ok = norms[0] > 0 and worst <= rtol * scale
    dilation = None
    if ok:
        dilation = norms[0] if exact else sum(norms) / m
    return SemiConformalReport(ok, dilation, worst)


def preserves_lsmall(a: Sequence[Sequence], ip_dom: InnerProduct, ip_cod: InnerProduct,
                     rtol: float = DEFAULT_RTOL) -> bool:
    """Whether ``A`` sends the generic L-small vector of the domain to an L-small vector."""
    u = lsmall_probe(ip_dom)
    return is_lsmall(linalg.matvec(a, u), ip_cod, rtol)

