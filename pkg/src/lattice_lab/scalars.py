"""Exact scalar arithmetic for the algebraic backends.

Two kinds of exact scalars live here:

* :class:`Exact` -- rational functions in named formal variables, stored as a
  pair of Laurent polynomials with Gaussian-rational (Q(i)) coefficients.
  These carry the symbolic parameters q, x, A, delta, ... through every
  algebraic identity, with exact equality decided by cross-multiplication.
* :class:`QuadExt` -- elements a + b*sqrt(D) of a real quadratic extension
  of Q.  These are needed wherever a concrete sqrt(Q) enters (the Potts
  representation has matrix entries 1/sqrt(Q)).

Floating-point work elsewhere uses plain ``complex``; nothing in this module
ever touches a float except the explicit ``evaluate``/``__complex__`` exits.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

RationalLike = Union[int, Fraction]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class QQi:
    """A Gaussian rational re + im*i with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    def __add__(self, other: "QQi") -> "QQi":
        return QQi(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "QQi") -> "QQi":
        return QQi(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "QQi":
        return QQi(-self.re, -self.im)

    def __mul__(self, other: "QQi") -> "QQi":
        return QQi(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    def inv(self) -> "QQi":
        d = self.re * self.re + self.im * self.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi(self.re / d, -self.im / d)

    def __truediv__(self, other: "QQi") -> "QQi":
        return self * other.inv()

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}*i)"


_QQI_ZERO = QQi(0)
_QQI_ONE = QQi(1)


def _coerce_qqi(c) -> QQi:
    if isinstance(c, QQi):
        return c
    if isinstance(c, (int, Fraction)):
        return QQi(c)
    raise TypeError(f"cannot use {type(c).__name__} as a Laurent coefficient")


class LaurentPoly:
    """A Laurent polynomial over Q(i) in a fixed tuple of named variables.

    Terms map exponent vectors (possibly negative) to nonzero coefficients.
    Arithmetic between polynomials over different variable tuples first
    aligns both onto the union of the variables.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: tuple[str, ...], terms: Mapping[tuple[int, ...], QQi]):
        self.vars = vars
        self.terms = {e: c for e, c in terms.items() if not c.is_zero()}

    @staticmethod
    def constant(c, vars: tuple[str, ...] = ()) -> "LaurentPoly":
        c = _coerce_qqi(c)
        zero = (0,) * len(vars)
        return LaurentPoly(vars, {zero: c} if not c.is_zero() else {})

    @staticmethod
    def variable(name: str, power: int = 1) -> "LaurentPoly":
        return LaurentPoly((name,), {(power,): _QQI_ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> QQi:
        if self.is_zero():
            return _QQI_ZERO
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def _aligned(self, other: "LaurentPoly") -> tuple["LaurentPoly", "LaurentPoly"]:
        if self.vars == other.vars:
            return self, other
        vars = tuple(sorted(set(self.vars) | set(other.vars)))
        return self._on_vars(vars), other._on_vars(vars)

    def _on_vars(self, vars: tuple[str, ...]) -> "LaurentPoly":
        if vars == self.vars:
            return self
        pos = [vars.index(v) for v in self.vars]
        terms: dict[tuple[int, ...], QQi] = {}
        for exps, c in self.terms.items():
            e = [0] * len(vars)
            for p, x in zip(pos, exps):
                e[p] = x
            terms[tuple(e)] = c
        return LaurentPoly(vars, terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            s = terms.get(e, _QQI_ZERO) + c
            if s.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = s
        return LaurentPoly(a.vars, terms)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        a, b = self._aligned(other)
        terms: dict[tuple[int, ...], QQi] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = terms.get(e, _QQI_ZERO) + c1 * c2
                if s.is_zero():
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return LaurentPoly(a.vars, terms)

    def scale(self, c: QQi) -> "LaurentPoly":
        if c.is_zero():
            return LaurentPoly(self.vars, {})
        return LaurentPoly(self.vars, {e: k * c for e, k in self.terms.items()})

    def shift(self, exps: tuple[int, ...]) -> "LaurentPoly":
        """Multiply by the monomial with the given exponent vector."""
        return LaurentPoly(self.vars, {tuple(a + b for a, b in zip(e, exps)): c
                                       for e, c in self.terms.items()})

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative power of a Laurent polynomial; use Exact")
        out = LaurentPoly.constant(1, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def min_exponents(self) -> tuple[int, ...]:
        if self.is_zero():
            return (0,) * len(self.vars)
        return tuple(min(e[i] for e in self.terms) for i in range(len(self.vars)))

    def _leading(self) -> tuple[tuple[int, ...], QQi]:
        e = max(self.terms)
        return e, self.terms[e]

    def divide_exact(self, div: "LaurentPoly") -> "LaurentPoly | None":
        """Return self/div if the division is exact, else None.

        Both are first shifted to ordinary polynomials; a single-divisor
        lex-order division then either terminates with zero remainder or
        proves inexactness for our (leading-term-cancelling) cases.
        """
        if div.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return LaurentPoly(self.vars, {})
        a, b = self._aligned(div)
        sa = tuple(-m for m in a.min_exponents())
        sb = tuple(-m for m in b.min_exponents())
        f, g = a.shift(sa), b.shift(sb)
        glead, gc = g._leading()
        quot: dict[tuple[int, ...], QQi] = {}
        steps = 0
        while not f.is_zero():
            steps += 1
            if steps > 1000:  # inexact division need not terminate under lex order
                return None
            flead, fc = f._leading()
            e = tuple(x - y for x, y in zip(flead, glead))
            if any(x < 0 for x in e):
                return None
            c = fc / gc
            quot[e] = c
            f = f - g.shift(e).scale(c)
        # undo the monomial shifts: self/div = (f*m_a)/(g*m_b) with m = x^{-s}
        back = tuple(y - x for x, y in zip(sa, sb))
        return LaurentPoly(a.vars, quot).shift(back)

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        out = 0j
        for e, c in self.terms.items():
            t = complex(c)
            for v, k in zip(self.vars, e):
                if k:
                    t *= values[v] ** k
            out += t
        return out

    def conjugate(self) -> "LaurentPoly":
        """Coefficient-wise complex conjugation; formal variables are fixed."""
        return LaurentPoly(self.vars, {e: c.conjugate() for e, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.terms.items())))

    def sorted_terms(self) -> list[tuple[tuple[int, ...], QQi]]:
        return sorted(self.terms.items())

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"{v}^{k}" if k != 1 else v
                            for v, k in zip(self.vars, e) if k != 0)
            if mono:
                parts.append(f"{c!r}*{mono}" if c != _QQI_ONE else mono)
            else:
                parts.append(repr(c))
        return " + ".join(parts)


_EMPTY_ONE = LaurentPoly.constant(1)


class Exact:
    """A rational function num/den of Laurent polynomials over Q(i).

    This is the ``exact-laurent`` scalar backend: a genuine field, so the
    six-vertex prefactor 1/(xq - x^-1 q^-1) and Markov-trace normalisations
    are representable without approximation.  Denominators collapse to 1
    whenever an exact division succeeds; equality always goes through
    cross-multiplication and is therefore independent of normalisation.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly = _EMPTY_ONE):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = LaurentPoly(num.vars, {}), _EMPTY_ONE
        elif len(den.terms) == 1:
            num, den = self._monomial_divide(num, den)
        else:
            q = num.divide_exact(den)
            if q is not None:
                num, den = q, _EMPTY_ONE
        self.num = num
        self.den = den

    @staticmethod
    def _monomial_divide(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
        a, b = num._aligned(den)
        (e, c), = b.terms.items()
        shifted = a.shift(tuple(-x for x in e)).scale(c.inv())
        return shifted, LaurentPoly.constant(1, shifted.vars)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_scalar(x) -> "Exact":
        if isinstance(x, Exact):
            return x
        if isinstance(x, (int, Fraction, QQi)):
            return Exact(LaurentPoly.constant(_coerce_qqi(x)))
        raise TypeError(f"cannot coerce {type(x).__name__} to Exact")

    @staticmethod
    def variable(name: str, power: int = 1) -> "Exact":
        return Exact(LaurentPoly.variable(name, power))

    # -- ring/field operations ---------------------------------------------

    def _coerced(self, other) -> "Exact | None":
        if isinstance(other, Exact):
            return other
        if isinstance(other, (int, Fraction, QQi)):
            return Exact.from_scalar(other)
        return None

    def __add__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return Exact(self.num + o.num, self.den)
        return Exact(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "Exact":
        return Exact(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return Exact(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by exact zero")
        return Exact(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o / self

    def inv(self) -> "Exact":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of exact zero")
        return Exact(self.den, self.num)

    def __pow__(self, k: int) -> "Exact":
        if k < 0:
            return self.inv() ** (-k)
        return Exact(self.num ** k, self.den ** k)

    def conjugate(self) -> "Exact":
        return Exact(self.num.conjugate(), self.den.conjugate())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other: object) -> bool:
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return (self.num * o.den) == (o.num * self.den)

    def __hash__(self) -> int:
        if self.den == _EMPTY_ONE or self.den.is_constant():
            c = self.den.constant_value()
            return hash(self.num.scale(c.inv()))
        return 0  # non-normalised fractions: rare, fall back to eq-only buckets

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        return self.num.evaluate(values) / self.den.evaluate(values)

    def __complex__(self) -> complex:
        return self.evaluate({})

    def as_laurent(self) -> LaurentPoly:
        """Return the numerator if the denominator is trivial, else raise."""
        if self.den.is_constant():
            return self.num.scale(self.den.constant_value().inv())
        q = self.num.divide_exact(self.den)
        if q is None:
            raise ValueError(f"{self!r} is not a Laurent polynomial")
        return q

    def __repr__(self) -> str:
        if self.den.is_constant() and self.den.constant_value() == _QQI_ONE:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


def var(name: str) -> Exact:
    """The formal variable ``name`` as an exact scalar."""
    return Exact.variable(name)


def exact(x) -> Exact:
    """Coerce an int/Fraction/QQi into the exact field."""
    return Exact.from_scalar(x)


EXACT_ZERO = exact(0)
EXACT_ONE = exact(1)
EXACT_I = exact(QQi(0, 1))


def _sqrt_free(d: int) -> tuple[int, int]:
    """Write d = f^2 * s with s squarefree; return (f, s)."""
    f, s, k = 1, d, 2
    while k * k <= s:
        while s % (k * k) == 0:
            s //= k * k
            f *= k
        k += 1
    return f, s


from math import gcd as _gcd


class QuadExt:
    """An element (an + bn*sqrt(D)) / den of the real quadratic field Q(sqrt(D)).

    Stored on raw integer triples with a canonical reduced form (positive
    denominator, gcd 1), which keeps the hot loops of the Potts-representation
    checks off Fraction overhead.  D is squarefree after construction; a
    perfect-square radicand folds into the rational part.  sqrt(D) irrational
    makes the conjugate-norm a^2 - D b^2 nonzero away from zero, so division
    is total on nonzero elements.
    """

    __slots__ = ("an", "bn", "den", "d")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0, d: int = 1):
        a, b = _as_fraction(a), _as_fraction(b)
        if d <= 0:
            raise ValueError("QuadExt needs a positive radicand")
        f, s = _sqrt_free(d)
        if s == 1:
            a, b = a + b * f, Fraction(0)
        else:
            b = b * f
        den = a.denominator * b.denominator // _gcd(a.denominator, b.denominator)
        self._store(int(a * den), int(b * den), den, s)

    def _store(self, an: int, bn: int, den: int, d: int) -> None:
        if den < 0:
            an, bn, den = -an, -bn, -den
        g = _gcd(_gcd(abs(an), abs(bn)), den)
        if g > 1:
            an, bn, den = an // g, bn // g, den // g
        self.an, self.bn, self.den = an, bn, den
        self.d = d if bn != 0 else 1

    @classmethod
    def _make(cls, an: int, bn: int, den: int, d: int) -> "QuadExt":
        out = object.__new__(cls)
        out._store(an, bn, den, d)
        return out

    @staticmethod
    def root(d: int) -> "QuadExt":
        """sqrt(d) as an exact quadratic integer."""
        return QuadExt(0, 1, d)

    @property
    def a(self) -> Fraction:
        return Fraction(self.an, self.den)

    @property
    def b(self) -> Fraction:
        return Fraction(self.bn, self.den)

    def _coerce(self, other) -> "QuadExt | None":
        if isinstance(other, QuadExt):
            if other.bn and self.bn and other.d != self.d:
                raise ValueError(f"mixed radicands sqrt({self.d}) and sqrt({other.d})")
            return other
        if isinstance(other, int):
            return QuadExt._make(other, 0, 1, 1)
        if isinstance(other, Fraction):
            return QuadExt._make(other.numerator, 0, other.denominator, 1)
        return None

    def _d(self, other: "QuadExt") -> int:
        return self.d if self.bn else other.d

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt._make(self.an * o.den + o.an * self.den,
                             self.bn * o.den + o.bn * self.den,
                             self.den * o.den, self._d(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadExt._make(-self.an, -self.bn, self.den, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt._make(self.an * o.den - o.an * self.den,
                             self.bn * o.den - o.bn * self.den,
                             self.den * o.den, self._d(o))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self._d(o)
        return QuadExt._make(self.an * o.an + self.bn * o.bn * d,
                             self.an * o.bn + self.bn * o.an,
                             self.den * o.den, d)

    __rmul__ = __mul__

    def inv(self) -> "QuadExt":
        norm = self.an * self.an - self.bn * self.bn * self.d
        if norm == 0:
            raise ZeroDivisionError("inverse of zero quadratic element")
        return QuadExt._make(self.an * self.den, -self.bn * self.den, norm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, k: int) -> "QuadExt":
        base = self if k >= 0 else self.inv()
        k = abs(k)
        out = QuadExt._make(1, 0, 1, self.d)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "QuadExt":
        """Complex conjugation: these are real numbers, so the identity."""
        return self

    def is_zero(self) -> bool:
        return self.an == 0 and self.bn == 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QuadExt):
            if self.bn and other.bn and self.d != other.d:
                return False
            return (self.an, self.bn, self.den) == (other.an, other.bn, other.den)
        if isinstance(other, (int, Fraction)):
            o = self._coerce(other)
            return (self.an, self.bn, self.den) == (o.an, o.bn, o.den)
        return NotImplemented

    def __hash__(self) -> int:
        if self.bn == 0:
            return hash(Fraction(self.an, self.den))
        return hash((self.an, self.bn, self.den, self.d))

    def __float__(self) -> float:
        import math
        return (self.an + self.bn * math.sqrt(self.d)) / self.den

    def __complex__(self) -> complex:
        return complex(float(self))

    def __repr__(self) -> str:
        if self.bn == 0:
            return str(self.a)
        if self.an == 0:
            return f"{self.b}*sqrt({self.d})"
        return f"({self.a}{'+' if self.bn > 0 else '-'}{abs(self.b)}*sqrt({self.d}))"
