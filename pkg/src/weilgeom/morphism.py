"""Smooth maps between charts: differentials, semi-conformality, tension, harmonic morphisms.

Two independent routes are kept side by side wherever possible: the
infinitesimal one (push L-neighbours and mirror images through the map) and a
classical one (matrices in orthonormal frames, the tension field formula,
pullbacks of harmonic 2-jets).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import linalg
from .expr import Ast, evaluate, parse
from .innerprod import (InnerProduct, RankDeficientError, SemiConformalReport, elements_close,
                        is_lsmall, lsmall_probe, semiconformal_matrix)
from .riemann import (GammaData, Jet2Scalar, Metric, _normalize_point, christoffel, exp2,
                      harmonic_jet_basis, is_harmonic_jet, log2, mirror, point_mode)
from .scalars import DEFAULT_RTOL, format_scalar, is_exact
from .weil import Jet1Element, Jet2Element, LapElement, scalar_part, sigma_coefficient

# sigma-coefficient tension = TENSION_NORMALIZATION * classical tension field.
# Pinned on the flat case, where both reduce to the trace of the Hessian.
TENSION_NORMALIZATION = 1


class NotSubmersionError(RankDeficientError):
    """The differential does not have full row rank at the point."""


@dataclass(frozen=True)
class SmoothMap:
    coords: tuple[str, ...]
    components: tuple[Ast, ...]

    @classmethod
    def from_strings(cls, coords: Sequence[str], components: Sequence[str]) -> "SmoothMap":
        coords = tuple(coords)
        if not components:
            raise ValueError("a map needs at least one component")
        return cls(coords, tuple(parse(c, coords) for c in components))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def m(self) -> int:
        return len(self.components)

    def __call__(self, x: Sequence, mode: str | None = None) -> list:
        if len(x) != self.n:
            raise ValueError(f"point has {len(x)} coordinates, map expects {self.n}")
        env = dict(zip(self.coords, x))
        mode = mode or point_mode(x)
        return [evaluate(c, env, mode) for c in self.components]


@dataclass(frozen=True)
class MapJet:
    """The 2-jet of a map at ``x``: values, Jacobian rows and component Hessians."""

    point: tuple
    value: tuple
    jacobian: tuple
    hessians: tuple


def map_jet(phi: SmoothMap, x: Sequence) -> MapJet:
    x = _normalize_point(x)
    n = phi.n
    env = [Jet2Element.variable(x[k], k, n) for k in range(n)]
    vals, jac, hess = [], [], []
    for e in phi(env, point_mode(x)):
        if not isinstance(e, Jet2Element):
            e = Jet2Element(e, [0] * n)
        vals.append(e.value)
        jac.append(tuple(e.grad))
        hess.append(tuple(tuple(r) for r in e.hess))
    return MapJet(x, tuple(vals), tuple(jac), tuple(hess))


def differential(phi: SmoothMap, x: Sequence) -> list[list]:
    """Jacobian of ``phi`` at ``x``; row ``i`` is the gradient of component ``i``."""
    x = _normalize_point(x)
    n = phi.n
    env = [Jet1Element.variable(x[k], k, n) for k in range(n)]
    rows = []
    for e in phi(env, point_mode(x)):
        rows.append(list(e.grad) if isinstance(e, Jet1Element) else [0 * scalar_part(x[0])] * n)
    return rows


def _matrix_route(phi, g, h, x, rtol) -> tuple[list[list], SemiConformalReport]:
    a = differential(phi, x)
    ip_dom = g.inner_product(x)
    ip_cod = h.inner_product(phi(x))
    try:
        return a, semiconformal_matrix(a, ip_dom, ip_cod, rtol)
    except RankDeficientError as exc:
        raise NotSubmersionError(f"not a submersion at {_fmt_point(x)}: {exc}") from None


def probe_image(phi: SmoothMap, g: Metric, h: Metric, x: Sequence) -> tuple[list, GammaData]:
    """``log_{phi(x)}(phi(exp_x(u)))`` for the domain L-probe ``u``, with the codomain Gamma data."""
    x = _normalize_point(x)
    gd = christoffel(g, x)
    z = exp2(gd, lsmall_probe(gd.inner_product()))
    hd = christoffel(h, phi(x))
    return log2(hd, phi(z, gd.mode)), hd


def is_semiconformal_at(phi: SmoothMap, g: Metric, h: Metric, x: Sequence,
                        rtol: float = DEFAULT_RTOL) -> SemiConformalReport:
    """Matrix test on ``d phi_x`` plus the probe test on ``log o phi o exp``.

    The probe route asks whether the image of the generic L-neighbour of ``x`` is
    an L-neighbour of ``phi(x)``; its verdict is stored in ``probe_verdict``.
    """
    x = _normalize_point(x)
    _, report = _matrix_route(phi, g, h, x, rtol)
    w, hd = probe_image(phi, g, h, x)
    verdict = is_lsmall(w, hd.inner_product(), rtol)
    return SemiConformalReport(report.is_semiconformal, report.dilation,
                               report.worst_defect, verdict)


def tension_defect(phi: SmoothMap, g: Metric, h: Metric, x: Sequence) -> list:
    """``E = phi(z') - mirror_{phi(x)}(phi(z))`` with ``z = exp_x(u)`` for the L-probe.

    Each coordinate lives in the Laplace algebra and is a pure sigma multiple.
    """
    x = _normalize_point(x)
    gd = christoffel(g, x)
    z = exp2(gd, lsmall_probe(gd.inner_product()))
    zp = mirror(gd, z)
    hd = christoffel(h, phi(x))
    mode = gd.mode
    return [a - b for a, b in zip(phi(zp, mode), mirror(hd, phi(z, mode)))]


def tension(phi: SmoothMap, g: Metric, h: Metric, x: Sequence) -> list:
    """Sigma-coefficients of the mirror defect :func:`tension_defect`."""
    return [sigma_coefficient(e) for e in tension_defect(phi, g, h, x)]


def classical_tension(phi: SmoothMap, g: Metric, h: Metric, x: Sequence) -> list:
    """``tau^c = g^ij (d_ij phi^c - Gamma^k_ij d_k phi^c + Gamma'^c_ab d_i phi^a d_j phi^b)``."""
    x = _normalize_point(x)
    n, m = phi.n, phi.m
    jet = map_jet(phi, x)
    gd = christoffel(g, x)
    hd = christoffel(h, list(jet.value))
    ginv = gd.inner_product().inverse()
    dphi, hphi = jet.jacobian, jet.hessians
    out = []
    for c in range(m):
        total = 0
        for i in range(n):
            for j in range(n):
                if is_exact(ginv[i][j]) and ginv[i][j] == 0:
                    continue
                t = hphi[c][i][j] - sum((gd.gamma[k][i][j] * dphi[c][k] for k in range(n)), 0)
                t = t + sum((hd.gamma[c][a][b] * dphi[a][i] * dphi[b][j]
                             for a in range(m) for b in range(m)), 0)
                total = total + ginv[i][j] * t
        out.append(total)
    return out


def _max_abs(xs) -> float:
    return max((abs(float(v)) for v in xs), default=0.0)


def is_harmonic_at(tau: Sequence, jet: MapJet, rtol: float = DEFAULT_RTOL) -> bool:
    if all(is_exact(t) for t in tau):
        return all(t == 0 for t in tau)
    scale = 1 + _max_abs(v for r in jet.jacobian for v in r) + \
        _max_abs(v for hs in jet.hessians for r in hs for v in r)
    return _max_abs(tau) <= rtol * scale


def pullback(j: Jet2Scalar, jet: MapJet) -> Jet2Scalar:
    """2-jet chain rule for ``j o phi``; needs only the jets, not closed forms."""
    if tuple(j.point) != tuple(jet.value):
        raise ValueError("jet is not based at the image point")
    m = len(jet.value)
    n = len(jet.point)
    d = jet.jacobian
    cov = [sum((j.covector[c] * d[c][i] for c in range(m)), 0) for i in range(n)]
    form = [[sum((d[a][i] * j.form[a][b] * d[b][k] for a in range(m) for b in range(m)), 0)
             + sum((j.covector[c] * jet.hessians[c][i][k] for c in range(m)), 0)
             for k in range(n)] for i in range(n)]
    return Jet2Scalar.make(jet.point, j.value, cov, form, j.label)


@dataclass(frozen=True)
class FIResult:
    direct: bool
    pullback: bool
    failing: tuple[str, ...] = ()
    certificates: dict = field(default_factory=dict, compare=False)

    @property
    def agree(self) -> bool:
        return self.direct == self.pullback

    def to_json(self) -> dict:
        return {
            "direct": self.direct,
            "pullback": self.pullback,
            "agree": self.agree,
            "failing_jets": list(self.failing),
            "certificates": {k: format_scalar(v) for k, v in self.certificates.items()},
        }


def pullback_verdict(phi: SmoothMap, g: Metric, h: Metric, x: Sequence,
                     rtol: float = DEFAULT_RTOL) -> tuple[bool, tuple[str, ...], dict]:
    """Whether every basic harmonic 2-jet at ``phi(x)`` pulls back to a harmonic jet."""
    x = _normalize_point(x)
    jet = map_jet(phi, x)
    failing, certs = [], {}
    for j in harmonic_jet_basis(h, list(jet.value)):
        ok, c = is_harmonic_jet(pullback(j, jet), g, rtol=rtol)
        certs[j.label] = c
        if not ok:
            failing.append(j.label)
    return not failing, tuple(failing), certs


@dataclass(frozen=True)
class PointReport:
    point: tuple
    differential: tuple
    semiconformal: SemiConformalReport
    tension: tuple
    harmonic: bool
    fi: FIResult | None = None

    @property
    def harmonic_morphism(self) -> bool:
        return self.harmonic and self.semiconformal.is_semiconformal

    @property
    def fi_agreement(self) -> bool | None:
        return None if self.fi is None else self.fi.agree

    def to_json(self) -> dict:
        out = {
            "point": [format_scalar(c) for c in self.point],
            "differential": [[format_scalar(c) for c in row] for row in self.differential],
            "semiconformal": self.semiconformal.to_json(),
            "tension": [format_scalar(t) for t in self.tension],
            "harmonic": self.harmonic,
            "harmonic_morphism": self.harmonic_morphism,
        }
        if self.fi is not None:
            out["fuglede_ishihara"] = self.fi.to_json()
        return out


def check_point(phi: SmoothMap, g: Metric, h: Metric, x: Sequence, fi: bool = False,
                rtol: float = DEFAULT_RTOL) -> PointReport:
    """Differential, semi-conformality, tension and (optionally) the jet-pullback route."""
    x = _normalize_point(x)
    sc = is_semiconformal_at(phi, g, h, x, rtol)
    jet = map_jet(phi, x)
    tau = tension(phi, g, h, x)
    harmonic = is_harmonic_at(tau, jet, rtol)
    fires = None
    if fi:
        ok, failing, certs = pullback_verdict(phi, g, h, x, rtol)
        fires = FIResult(harmonic and sc.is_semiconformal, ok, failing, certs)
    return PointReport(x, tuple(tuple(r) for r in jet.jacobian), sc, tuple(tau), harmonic, fires)


def fuglede_ishihara_check(phi: SmoothMap, g: Metric, h: Metric, x: Sequence,
                           rtol: float = DEFAULT_RTOL) -> FIResult:
    """``(direct, pullback)`` verdicts: harmonic morphism vs. harmonic jets pull back."""
    return check_point(phi, g, h, x, fi=True, rtol=rtol).fi


def _fmt_point(x: Sequence) -> str:
    return "(" + ", ".join(format_scalar(c) for c in x) + ")"


def lsmall_preserved_with_quadratic(a: Sequence[Sequence], quad: Sequence[Sequence[Sequence]],
                                    ip_dom: InnerProduct, ip_cod: InnerProduct,
                                    rtol: float = DEFAULT_RTOL) -> bool:
    """Whether ``u -> A u + B(u, u)`` sends the domain L-probe to an L-small vector.

    ``quad[c]`` is the symmetric matrix of the ``c``-th component of ``B``.
    """
    u = lsmall_probe(ip_dom)
    w = linalg.matvec(a, u)
    w = [wc + linalg.bilinear(q, u, u) for wc, q in zip(w, quad)]
    return is_lsmall(w, ip_cod, rtol)


def is_pure_sigma(e) -> bool:
    """Value and gradient parts of a Laplace-algebra element vanish (exactly or to 0 for floats)."""
    if not isinstance(e, LapElement):
        return scalar_part(e) == 0
    zero = LapElement(0, [0] * e.n, e.sigma, e.form)
    return elements_close(e, zero)
