"""Nilpotent jet algebras: first and second neighbourhoods and the Laplace algebra.

Three Weil algebras are provided, each generic over its coefficient ring:

* :class:`Jet1Element` -- ``R[x_1..x_n]/m^2`` (value + gradient),
* :class:`Jet2Element` -- ``R[x_1..x_n]/m^3`` stored as value, gradient and
  symmetric Hessian, meaning ``v + g.d + 1/2 d^T H d``,
* :class:`LapElement` -- the ``(n+2)``-dimensional Laplace algebra with basis
  ``1, x_1..x_n, sigma`` where ``x_i x_j = Q_ij sigma`` and ``x_i sigma = sigma^2 = 0``.
  With the default ``Q = I`` these are exactly the relations ``x_i^2 = x_j^2``,
  ``x_i x_j = 0`` (i != j).

Coefficients may be ``Fraction``, ``float`` or another element of this module,
so towers such as "dual numbers over the Laplace algebra" work out of the box.
Elements are immutable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .scalars import ExactModeError, is_exact

__all__ = [
    "DomainError",
    "Jet1Element",
    "Jet2Element",
    "LapElement",
    "WeilElement",
    "EXACT_FUNCTIONS",
    "FUNCTIONS",
    "jet2_to_lap",
    "lap_mul",
    "lift_univariate",
    "scalar_part",
    "sigma_coefficient",
]


class DomainError(ValueError):
    """An elementary function was applied outside its domain."""


_SCALARS = (int, Fraction, float)


def scalar_part(x):
    """The innermost value component (the point of the base scheme)."""
    while isinstance(x, WeilElement):
        x = x.value
    return x


def _depth(x) -> int:
    return x.depth if isinstance(x, WeilElement) else 0


def _order(x) -> int:
    return x.nil_order() if isinstance(x, WeilElement) else 0


def _inverse(c):
    if isinstance(c, WeilElement):
        return c.reciprocal()
    if isinstance(c, int):
        return Fraction(1, c)
    return 1 / c


class WeilElement:
    """Shared operator plumbing; subclasses supply the ring structure."""

    __slots__ = ()
    depth: int
    value: object

    # -- hooks -------------------------------------------------------------
    def _coeffs(self) -> tuple:
        raise NotImplementedError

    def _compatible(self, other) -> bool:
        raise NotImplementedError

    def _const(self, c):
        raise NotImplementedError

    def _scale(self, c):
        raise NotImplementedError

    def _add(self, other):
        raise NotImplementedError

    def _mul(self, other):
        raise NotImplementedError

    def _own_order(self) -> int:
        raise NotImplementedError

    # -- coercion ----------------------------------------------------------
    def _kind(self, other) -> str | None:
        if isinstance(other, WeilElement):
            if other.depth < self.depth:
                return "const"
            if other.depth == self.depth and type(other) is type(self):
                if not self._compatible(other):
                    raise ValueError(f"incompatible operands: {self!r} and {other!r}")
                return "same"
            return None
        if isinstance(other, _SCALARS):
            return "const"
        return None

    def nil_order(self) -> int:
        """An ``N`` with ``(a - scalar_part(a))**(N+1) == 0``."""
        return self._own_order() + max((_order(c) for c in self._coeffs()), default=0)

    def scalar_part(self):
        return scalar_part(self)

    # -- arithmetic --------------------------------------------------------
    # Python never tries the reflected method when both operands share a class,
    # so an operand sitting higher in a tower of the same class is handled by
    # calling its reflected method directly.
    def _defer(self, other) -> bool:
        return isinstance(other, WeilElement) and type(other) is type(self) \
            and other.depth > self.depth

    def __add__(self, other):
        kind = self._kind(other)
        if kind == "same":
            return self._add(other)
        if kind == "const":
            return self._add(self._const(other))
        if self._defer(other):
            return other.__radd__(self)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self._scale(-1)

    def __pos__(self):
        return self

    def __sub__(self, other):
        kind = self._kind(other)
        if kind == "same":
            return self._add(-other)
        if kind == "const":
            return self._add(self._const(-other))
        if self._defer(other):
            return other.__rsub__(self)
        return NotImplemented

    def __rsub__(self, other):
        if self._kind(other) != "const":
            return NotImplemented
        return (-self)._add(self._const(other))

    def __mul__(self, other):
        kind = self._kind(other)
        if kind == "same":
            return self._mul(other)
        if kind == "const":
            return self._scale(other)
        if self._defer(other):
            return other.__rmul__(self)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        kind = self._kind(other)
        if kind == "same":
            return self._mul(other.reciprocal())
        if kind == "const":
            if scalar_part(other) == 0:
                raise ZeroDivisionError("division by an element with zero value component")
            return self._scale(_inverse(other))
        if self._defer(other):
            return other.__rtruediv__(self)
        return NotImplemented

    def __rtruediv__(self, other):
        if self._kind(other) != "const":
            return NotImplemented
        return self.reciprocal()._scale(other)

    def __pow__(self, p):
        if not isinstance(p, int):
            return NotImplemented
        if p < 0:
            return self.reciprocal() ** (-p)
        result = self._const(1)
        base = self
        while p:
            if p & 1:
                result = result * base
            p >>= 1
            if p:
                base = base * base
        return result

    def reciprocal(self):
        return lift_univariate("reciprocal", self)

    def __eq__(self, other):
        kind = self._kind(other)
        if kind == "same":
            return self._coeffs() == other._coeffs()
        if kind == "const":
            return self._coeffs() == self._const(other)._coeffs()
        if self._defer(other):
            return other.__eq__(self)
        return NotImplemented

    def __hash__(self):
        coeffs = self._coeffs()
        if all(c == 0 for c in coeffs[1:]):
            return hash(coeffs[0])
        return hash(coeffs)


def _tuple(xs: Iterable) -> tuple:
    return tuple(xs)


class Jet1Element(WeilElement):
    """First-order jet ``value + sum grad_i * eps_i`` with ``eps_i eps_j = 0``."""

    __slots__ = ("value", "grad", "depth")

    def __init__(self, value, grad: Sequence, depth: int | None = None):
        self.value = value
        self.grad = _tuple(grad)
        if depth is None:
            depth = 1 + max(_depth(c) for c in (value, *self.grad))
        self.depth = depth

    @property
    def n(self) -> int:
        return len(self.grad)

    @classmethod
    def variable(cls, x0, i: int, n: int) -> "Jet1Element":
        return cls(x0, [1 if k == i else 0 for k in range(n)])

    def _coeffs(self):
        return (self.value, *self.grad)

    def _compatible(self, other):
        return self.n == other.n

    def _const(self, c):
        return Jet1Element(c, (0,) * self.n, self.depth)

    def _scale(self, c):
        return Jet1Element(self.value * c, [g * c for g in self.grad], self.depth)

    def _add(self, o):
        return Jet1Element(self.value + o.value, [a + b for a, b in zip(self.grad, o.grad)], self.depth)

    def _mul(self, o):
        v1, v2 = self.value, o.value
        return Jet1Element(v1 * v2, [v1 * b + v2 * a for a, b in zip(self.grad, o.grad)], self.depth)

    def _own_order(self):
        return 1

    def __repr__(self):
        return f"Jet1Element({self.value!r}, {list(self.grad)!r})"


class Jet2Element(WeilElement):
    """Second-order jet ``value + grad.d + 1/2 d^T hess d`` modulo degree 3."""

    __slots__ = ("value", "grad", "hess", "depth")

    def __init__(self, value, grad: Sequence, hess: Sequence[Sequence] | None = None,
                 depth: int | None = None):
        self.value = value
        self.grad = _tuple(grad)
        n = len(self.grad)
        if hess is None:
            self.hess = tuple((0,) * n for _ in range(n))
        else:
            self.hess = tuple(tuple(row) for row in hess)
            if len(self.hess) != n or any(len(row) != n for row in self.hess):
                raise ValueError(f"Hessian must be {n}x{n}")
            for i in range(n):
                for j in range(i):
                    if self.hess[i][j] != self.hess[j][i]:
                        raise ValueError("Hessian must be symmetric")
        if depth is None:
            depth = 1 + max(_depth(c) for c in self._coeffs())
        self.depth = depth

    @property
    def n(self) -> int:
        return len(self.grad)

    @classmethod
    def variable(cls, x0, i: int, n: int) -> "Jet2Element":
        return cls(x0, [1 if k == i else 0 for k in range(n)])

    def _coeffs(self):
        return (self.value, *self.grad, *(h for row in self.hess for h in row))

    def _compatible(self, other):
        return self.n == other.n

    def _make(self, value, grad, hess):
        # skips the symmetry check; callers build symmetric Hessians
        e = object.__new__(Jet2Element)
        e.value, e.grad, e.hess, e.depth = value, tuple(grad), hess, self.depth
        return e

    def _const(self, c):
        n = self.n
        return self._make(c, (0,) * n, tuple((0,) * n for _ in range(n)))

    def _scale(self, c):
        return self._make(self.value * c, [g * c for g in self.grad],
                          tuple(tuple(h * c for h in row) for row in self.hess))

    def _add(self, o):
        return self._make(
            self.value + o.value,
            [a + b for a, b in zip(self.grad, o.grad)],
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.hess, o.hess)),
        )

    def _mul(self, o):
        v1, g1, h1 = self.value, self.grad, self.hess
        v2, g2, h2 = o.value, o.grad, o.hess
        n = self.n
        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                h = v1 * h2[i][j] + v2 * h1[i][j] + g1[i] * g2[j] + g2[i] * g1[j]
                rows[i][j] = rows[j][i] = h
        return self._make(v1 * v2, [v1 * b + v2 * a for a, b in zip(g1, g2)],
                          tuple(tuple(r) for r in rows))

    def _own_order(self):
        return 2

    def __repr__(self):
        return f"Jet2Element({self.value!r}, {list(self.grad)!r}, {[list(r) for r in self.hess]!r})"


class LapElement(WeilElement):
    """Element ``value + sum grad_i x_i + sigma * s`` of the Laplace algebra.

    ``form`` is the matrix ``Q`` in the relations ``x_i x_j = Q_ij sigma``;
    ``None`` stands for the identity.  A non-identity form is the same algebra
    written in skewed generators (``x = F d`` with ``F F^T = Q``), which lets an
    L-small probe for an arbitrary rational inner product stay rational.
    """

    __slots__ = ("value", "grad", "sigma", "form", "depth")

    def __init__(self, value, grad: Sequence, sigma=0, form: Sequence[Sequence] | None = None,
                 depth: int | None = None):
        self.value = value
        self.grad = _tuple(grad)
        self.sigma = sigma
        n = len(self.grad)
        if n < 2:
            raise ValueError("the Laplace algebra needs n >= 2; use Jet2Element for n = 1")
        if form is not None:
            form = tuple(tuple(row) for row in form)
            if len(form) != n or any(len(r) != n for r in form):
                raise ValueError(f"form must be {n}x{n}")
            if any(form[i][j] != form[j][i] for i in range(n) for j in range(i)):
                raise ValueError("form must be symmetric")
            if all(form[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n)):
                form = None
        self.form = form
        if depth is None:
            depth = 1 + max(_depth(c) for c in (value, sigma, *self.grad))
        self.depth = depth

    @property
    def n(self) -> int:
        return len(self.grad)

    @classmethod
    def generator(cls, i: int, n: int, form=None) -> "LapElement":
        return cls(0, [1 if k == i else 0 for k in range(n)], 0, form)

    @classmethod
    def sigma_unit(cls, n: int, form=None) -> "LapElement":
        return cls(0, (0,) * n, 1, form)

    def _coeffs(self):
        return (self.value, *self.grad, self.sigma)

    def _compatible(self, other):
        return self.n == other.n and self.form == other.form

    def _make(self, value, grad, sigma):
        e = object.__new__(LapElement)
        e.value, e.grad, e.sigma, e.form, e.depth = value, tuple(grad), sigma, self.form, self.depth
        return e

    def _const(self, c):
        return self._make(c, (0,) * self.n, 0)

    def _scale(self, c):
        return self._make(self.value * c, [g * c for g in self.grad], self.sigma * c)

    def _add(self, o):
        return self._make(self.value + o.value, [a + b for a, b in zip(self.grad, o.grad)],
                          self.sigma + o.sigma)

    def _mul(self, o):
        v1, g1, s1 = self.value, self.grad, self.sigma
        v2, g2, s2 = o.value, o.grad, o.sigma
        if self.form is None:
            cross = sum((a * b for a, b in zip(g1, g2)), 0)
        else:
            cross = 0
            for i, row in enumerate(self.form):
                if g1[i] == 0:
                    continue
                cross = cross + g1[i] * sum((q * b for q, b in zip(row, g2)), 0)
        return self._make(v1 * v2, [v1 * b + v2 * a for a, b in zip(g1, g2)],
                          v1 * s2 + v2 * s1 + cross)

    def _own_order(self):
        return 2

    def __repr__(self):
        extra = "" if self.form is None else f", form={[list(r) for r in self.form]!r}"
        return f"LapElement({self.value!r}, {list(self.grad)!r}, {self.sigma!r}{extra})"


def lap_mul(a: LapElement, b: LapElement) -> LapElement:
    if not (isinstance(a, LapElement) and isinstance(b, LapElement)):
        raise TypeError("lap_mul expects two LapElements")
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: Lap({a.n}) vs Lap({b.n})")
    return a * b


def jet2_to_lap(a: Jet2Element, form=None) -> LapElement:
    """Quotient map ``D_2(n)``-functions -> ``D_L(n)``-functions.

    ``1/2 d^T H d`` is sent to ``1/2 sum Q_ij H_ij sigma``; for the standard
    relations this is ``trace(H)/2``.
    """
    if a.n < 2:
        raise ValueError("jet2_to_lap needs n >= 2")
    n = a.n
    q = form if form is not None else [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    tr = 0
    for i in range(n):
        for j in range(n):
            if q[i][j] != 0:
                tr = tr + q[i][j] * a.hess[i][j]
    half = Fraction(1, 2) if is_exact(scalar_part(a)) else 0.5
    return LapElement(a.value, a.grad, tr * half, form)


def sigma_coefficient(x):
    """Coefficient along ``sigma``; for a ``Jet2Element(1)`` this is ``d^2``."""
    if isinstance(x, LapElement):
        return x.sigma
    if isinstance(x, Jet2Element) and x.n == 1:
        return x.hess[0][0] * (Fraction(1, 2) if is_exact(scalar_part(x)) else 0.5)
    if isinstance(x, _SCALARS):
        return 0
    raise TypeError(f"no sigma coefficient for {type(x).__name__}")


# -- elementary functions -------------------------------------------------

EXACT_FUNCTIONS = frozenset({"square", "reciprocal"})
FUNCTIONS = EXACT_FUNCTIONS | {"sqrt", "sin", "cos", "exp", "log", "tanh"}


def _tanh_derivatives(t: float, k: int) -> list[float]:
    poly = [0.0, 1.0]  # d^0/dx^0 tanh = t
    out = []
    for _ in range(k + 1):
        out.append(sum(c * t**i for i, c in enumerate(poly)))
        dp = [i * c for i, c in enumerate(poly)][1:]
        # multiply by (1 - t^2)
        nxt = [0.0] * (len(dp) + 2)
        for i, c in enumerate(dp):
            nxt[i] += c
            nxt[i + 2] -= c
        poly = nxt
    return out


def _derivatives(name: str, s, k: int) -> list:
    """``[f(s), f'(s), ..., f^(k)(s)]`` for a scalar ``s``."""
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    exact = is_exact(s)
    if name == "square":
        return ([s * s, 2 * s, 2] + [0] * k)[: k + 1]
    if name == "reciprocal":
        if s == 0:
            raise ZeroDivisionError("reciprocal of an element with zero value component")
        s = Fraction(s) if exact else s
        return [(-1) ** j * math.factorial(j) / s ** (j + 1) for j in range(k + 1)]
    if exact:
        raise ExactModeError(f"{name} is not available in exact mode")
    s = float(s)
    if name == "sqrt":
        if s < 0 or (s == 0 and k > 0):
            raise DomainError(f"sqrt is not smooth at {s!r}")
        out, c = [], 1.0
        for j in range(k + 1):
            out.append(c * s ** (0.5 - j))
            c *= 0.5 - j
        return out
    if name == "sin":
        cyc = [math.sin(s), math.cos(s), -math.sin(s), -math.cos(s)]
        return [cyc[j % 4] for j in range(k + 1)]
    if name == "cos":
        cyc = [math.cos(s), -math.sin(s), -math.cos(s), math.sin(s)]
        return [cyc[j % 4] for j in range(k + 1)]
    if name == "exp":
        return [math.exp(s)] * (k + 1)
    if name == "log":
        if s <= 0:
            raise DomainError(f"log of non-positive value {s!r}")
        return [math.log(s)] + [(-1) ** (j - 1) * math.factorial(j - 1) / s**j for j in range(1, k + 1)]
    return _tanh_derivatives(math.tanh(s), k)


def lift_univariate(name: str, a):
    """Apply an elementary function to a scalar or a Weil-algebra element.

    Uses the Taylor expansion ``f(s + N) = sum f^(k)(s) N^k / k!`` about the
    scalar part ``s``; it terminates exactly because ``N`` is nilpotent.  For a
    single-level ``Jet2Element`` or ``LapElement`` this is the second-order lift
    ``f(s) + f'(s) N + 1/2 f''(s) N^2``.
    """
    s = scalar_part(a)
    if not isinstance(a, WeilElement):
        return _derivatives(name, s, 0)[0]
    order = a.nil_order()
    derivs = _derivatives(name, s, order)
    nil = a - s
    result = a._const(derivs[0])
    power = None
    for k in range(1, order + 1):
        power = nil if power is None else power * nil
        coef = derivs[k]
        if coef == 0:
            continue
        coef = Fraction(coef, math.factorial(k)) if is_exact(coef) else coef / math.factorial(k)
        result = result + power * coef
    return result
