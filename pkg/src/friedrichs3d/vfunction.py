"""Coupling functions: finite real trigonometric polynomials on the torus.

A coupling function is stored as a sparse sum

    v(p) = sum_m  c_m * b(m1, p1) * b(m2, p2) * b(m3, p3)

with the per-axis basis b(0, x) = 1, b(n, x) = cos(n x) for n > 0 and
b(n, x) = sin(|n| x) for n < 0.  Harmonic orders are capped at 4 so that
parsed expressions stay small; products use exact product-to-sum
identities, so all algebra (and differentiation) is closed and exact.
"""

from __future__ import annotations

import re
from functools import lru_cache

import numpy as np

MAX_HARMONIC = 4

__all__ = ["VFunction", "VParseError", "parse_v"]


class VParseError(ValueError):
    """Raised when a coupling-function expression cannot be parsed."""


def _basis_eval(n: int, x):
    if n == 0:
        return 1.0 if np.isscalar(x) else np.ones_like(np.asarray(x, dtype=float))
    if n > 0:
        return np.cos(n * x)
    return np.sin(-n * x)


def _normalize(terms) -> tuple:
    acc = {}
    for m, c in terms:
        m = (int(m[0]), int(m[1]), int(m[2]))
        c = float(c)
        if not np.isfinite(c):
            raise ValueError("coefficients must be finite")
        acc[m] = acc.get(m, 0.0) + c
    out = tuple(sorted((m, c) for m, c in acc.items() if c != 0.0))
    for m, _ in out:
        if max(abs(j) for j in m) > MAX_HARMONIC:
            raise ValueError(
                "harmonic order exceeds the cap of %d per axis" % MAX_HARMONIC
            )
    return out


def _axis_product(a: int, b: int):
    """Expand b(a, x) * b(b, x) into [(index, factor)] by product-to-sum rules."""
    if a == 0:
        return [(b, 1.0)]
    if b == 0:
        return [(a, 1.0)]
    if a > 0 and b > 0:
        # cos cos
        return [(a + b, 0.5), (abs(a - b), 0.5)]
    if a < 0 and b < 0:
        # sin sin
        m, n = -a, -b
        return [(abs(m - n), 0.5), (m + n, -0.5)]
    # mixed: cos(m x) * sin(n x) = (sin((n+m)x) + sin((n-m)x)) / 2
    m = a if a > 0 else b
    n = -(b if a > 0 else a)
    out = [(-(n + m), 0.5)]
    d = n - m
    if d > 0:
        out.append((-d, 0.5))
    elif d < 0:
        out.append((d, -0.5))  # sin(d x) with d < 0 is -sin(|d| x)
    return out


def _axis_exp(n: int) -> dict:
    """Complex-exponential expansion of one basis factor: {freq: coeff}."""
    if n == 0:
        return {0: 1.0 + 0.0j}
    if n > 0:
        return {n: 0.5 + 0.0j, -n: 0.5 + 0.0j}
    m = -n
    return {m: -0.5j, -m: 0.5j}


class VFunction:
    """Immutable, hashable trigonometric polynomial in three angles."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        object.__setattr__(self, "terms", _normalize(terms))

    def __setattr__(self, name, value):
        raise AttributeError("VFunction is immutable")

    # ---- constructors -------------------------------------------------

    @classmethod
    def constant(cls, c: float) -> "VFunction":
        return cls([((0, 0, 0), float(c))])

    @classmethod
    def zero(cls) -> "VFunction":
        return cls(())

    @classmethod
    def axis_mode(cls, axis: int, n: int, coeff: float = 1.0) -> "VFunction":
        """coeff * cos(n p_axis) for n > 0, coeff * sin(|n| p_axis) for n < 0."""
        if axis not in (0, 1, 2):
            raise ValueError("axis must be 0, 1 or 2")
        m = [0, 0, 0]
        m[axis] = int(n)
        return cls([(tuple(m), coeff)])

    @classmethod
    def from_expression(cls, text: str) -> "VFunction":
        return parse_v(text)

    # ---- basic queries -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def reflection_symmetric(self) -> bool:
        """True when v(-p) = v(p) termwise (no sine factors)."""
        return all(min(m) >= 0 for m, _ in self.terms)

    def coefficient_bound(self) -> float:
        return float(sum(abs(c) for _, c in self.terms))

    # ---- evaluation ----------------------------------------------------

    def evaluate(self, px, py, pz):
        """Evaluate on broadcastable coordinate arrays."""
        total = 0.0
        for (m1, m2, m3), c in self.terms:
            total = total + c * _basis_eval(m1, px) * _basis_eval(m2, py) * _basis_eval(m3, pz)
        return total

    def __call__(self, p) -> float:
        c1, c2, c3 = (p.coords if hasattr(p, "coords") else tuple(np.asarray(p, dtype=float)))
        return float(self.evaluate(c1, c2, c3))

    # ---- exact algebra ---------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return VFunction(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return VFunction([(m, -c) for m, c in self.terms])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = []
        for ma, ca in self.terms:
            for mb, cb in other.terms:
                base = ca * cb
                for i1, f1 in _axis_product(ma[0], mb[0]):
                    for i2, f2 in _axis_product(ma[1], mb[1]):
                        for i3, f3 in _axis_product(ma[2], mb[2]):
                            out.append(((i1, i2, i3), base * f1 * f2 * f3))
        return VFunction(out)

    __rmul__ = __mul__

    @staticmethod
    def _coerce(other):
        if isinstance(other, VFunction):
            return other
        if isinstance(other, (int, float)):
            return VFunction.constant(float(other))
        return NotImplemented

    # ---- calculus --------------------------------------------------------

    def derivative(self, axis: int) -> "VFunction":
        """Exact partial derivative along the given axis (0, 1 or 2)."""
        if axis not in (0, 1, 2):
            raise ValueError("axis must be 0, 1 or 2")
        out = []
        for m, c in self.terms:
            n = m[axis]
            if n == 0:
                continue
            new = list(m)
            if n > 0:
                # (cos n x)' = -n sin(n x)
                new[axis] = -n
                out.append((tuple(new), -n * c))
            else:
                # (sin n x)' = n cos(n x) with n = |m|
                new[axis] = -n
                out.append((tuple(new), -n * c))
        return VFunction(out)

    def vanishing_order(self, point, max_order: int = 4):
        """Smallest q with some order-q partial nonzero at `point`, else None.

        Uses exact derivatives, so the answer is free of finite differencing.
        """
        coords = point.coords if hasattr(point, "coords") else tuple(np.asarray(point, float))
        level = {(0, 0, 0): self}
        for q in range(max_order + 1):
            scale = max(1.0, self.coefficient_bound() * MAX_HARMONIC ** q)
            for fn in level.values():
                if abs(fn.evaluate(*coords)) > 1e-9 * scale:
                    return q
            nxt = {}
            for alpha, fn in level.items():
                for axis in range(3):
                    beta = list(alpha)
                    beta[axis] += 1
                    beta = tuple(beta)
                    if beta not in nxt:
                        nxt[beta] = fn.derivative(axis)
            level = nxt
        return None

    # ---- spectral data ---------------------------------------------------

    def exp_coeffs(self) -> dict:
        """Complex-exponential coefficients {(n1,n2,n3): c} with v = sum c e^{i n.p}."""
        return dict(_exp_coeffs_cached(self))

    def squared_exp_coeffs(self) -> dict:
        """Exponential coefficients of v^2 (plain convolution, bypasses the cap)."""
        return dict(_squared_exp_cached(self))

    # ---- serialization and dunders ----------------------------------------

    def to_terms(self):
        return [[list(m), c] for m, c in self.terms]

    @classmethod
    def from_terms(cls, data) -> "VFunction":
        return cls([(tuple(m), c) for m, c in data])

    def __eq__(self, other):
        if not isinstance(other, VFunction):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        if self.is_zero:
            return "VFunction.zero()"
        bits = []
        for (m1, m2, m3), c in self.terms:
            fac = []
            for axis, n in enumerate((m1, m2, m3)):
                if n > 0:
                    fac.append("cos(%dp%d)" % (n, axis + 1))
                elif n < 0:
                    fac.append("sin(%dp%d)" % (-n, axis + 1))
            bits.append("%g%s" % (c, ("*" + "*".join(fac)) if fac else ""))
        return "VFunction<%s>" % " + ".join(bits)


@lru_cache(maxsize=256)
def _exp_coeffs_cached(v: VFunction):
    acc = {}
    for m, c in v.terms:
        partial = {(): c + 0.0j}
        for axis in range(3):
            ax = _axis_exp(m[axis])
            nxt = {}
            for key, val in partial.items():
                for n, w in ax.items():
                    kk = key + (n,)
                    nxt[kk] = nxt.get(kk, 0.0j) + val * w
            partial = nxt
        for key, val in partial.items():
            acc[key] = acc.get(key, 0.0j) + val
    return tuple(sorted((k, c) for k, c in acc.items() if abs(c) > 0.0))


@lru_cache(maxsize=256)
def _squared_exp_cached(v: VFunction):
    base = _exp_coeffs_cached(v)
    acc = {}
    for ka, ca in base:
        for kb, cb in base:
            kk = (ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2])
            acc[kk] = acc.get(kk, 0.0j) + ca * cb
    return tuple(sorted((k, c) for k, c in acc.items() if abs(c) > 1e-300))


# ---------------------------------------------------------------------------
# Expression parser: numbers, + - *, cos(n*pj)/sin(n*pj), parentheses.
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>cos|sin|p1|p2|p3)"
    r"|(?P<op>[+\-*()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise VParseError("unexpected character %r at position %d" % (text[pos], pos))
        if m.lastgroup == "num":
            out.append(("num", m.group("num")))
        elif m.lastgroup == "name":
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
        pos = m.end()
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise VParseError("expected %s, found %r" % (kind, tok[1] or "end of input"))
        if value is not None and tok[1] != value:
            raise VParseError("expected %r, found %r" % (value, tok[1] or "end of input"))
        self.i += 1
        return tok

    def parse(self) -> VFunction:
        node = self.expr()
        if self.peek()[0] != "end":
            raise VParseError("trailing input from %r" % self.peek()[1])
        return node

    def expr(self) -> VFunction:
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take("op")[1]
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self) -> VFunction:
        node = self.unary()
        while self.peek() == ("op", "*"):
            self.take("op", "*")
            node = node * self.unary()
        return node

    def unary(self) -> VFunction:
        if self.peek() == ("op", "-"):
            self.take("op", "-")
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take("op", "+")
            return self.unary()
        return self.primary()

    def primary(self) -> VFunction:
        kind, val = self.peek()
        if kind == "num":
            self.take("num")
            return VFunction.constant(float(val))
        if kind == "name" and val in ("cos", "sin"):
            return self.trig()
        if kind == "op" and val == "(":
            self.take("op", "(")
            node = self.expr()
            self.take("op", ")")
            return node
        raise VParseError("expected a number, cos/sin or '(', found %r" % (val or "end of input"))

    def trig(self) -> VFunction:
        fname = self.take("name")[1]
        self.take("op", "(")
        mult = 1
        kind, val = self.peek()
        if kind == "num":
            self.take("num")
            f = float(val)
            mult = int(f)
            if mult != f or not 1 <= mult <= MAX_HARMONIC:
                raise VParseError(
                    "harmonic multiplier must be an integer in 1..%d, got %r" % (MAX_HARMONIC, val)
                )
            self.take("op", "*")
        name = self.take("name")[1]
        if name not in ("p1", "p2", "p3"):
            raise VParseError("expected p1, p2 or p3 inside %s(...)" % fname)
        self.take("op", ")")
        axis = int(name[1]) - 1
        return VFunction.axis_mode(axis, mult if fname == "cos" else -mult)


def parse_v(text: str) -> VFunction:
    """Parse an expression like "1 - 0.5*cos(p1) + 0.25*sin(2*p3)" into a VFunction."""
    if not isinstance(text, str) or not text.strip():
        raise VParseError("empty coupling-function expression")
    try:
        return _Parser(_tokenize(text)).parse()
    except VParseError:
        raise
    except ValueError as exc:
        raise VParseError(str(exc)) from None
