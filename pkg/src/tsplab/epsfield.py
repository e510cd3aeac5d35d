"""Exact arithmetic in Q(e): rational functions of a formal positive infinitesimal.

The field element is a quotient num(e)/den(e) of integer-coefficient
polynomials.  Canonical form makes every value a unique representation:

* num and den are coprime as polynomials,
* the gcd of all integer coefficients of num and den together is 1,
* the lowest-order nonzero coefficient of den is positive.

With the denominator normalized this way, the order is decided by a single
coefficient inspection: a nonzero element is positive iff the lowest-order
nonzero coefficient of its numerator is positive.  That rule realizes
"e is positive but below every positive rational", so 0 < e < q for every
rational q > 0, and 1/e is larger than every rational.

Everything here is immutable and exact; no floats enter this module.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction

CoeffLike = Union[int, Fraction]
ScalarLike = Union[int, Fraction, "EpsRational"]


class DivisionByZero(ZeroDivisionError):
    """Division by the zero element of Q(e)."""


class InfiniteElement(ArithmeticError):
    """Shadow requested for an element with no finite standard part."""


class PoleAtPoint(ArithmeticError):
    """Evaluation at a rational point where the denominator vanishes."""


# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficients ascending in powers of e)
# ---------------------------------------------------------------------------


def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    n = len(coeffs)
    while n > 0 and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


def _padd(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pneg(a: Sequence[int]) -> tuple[int, ...]:
    return tuple(-c for c in a)


def _pmul(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] += ca * cb
    return _trim(out)


def _pcontent(a: Sequence[int]) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return g


def _pprimitive(a: Sequence[int]) -> tuple[int, ...]:
    g = _pcontent(a)
    if g in (0, 1):
        return _trim(a)
    return tuple(c // g for c in _trim(a))


def _pdivexact(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Exact polynomial division a / b; the division is known to be exact."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in a]
    quo = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    db = len(b) - 1
    lead = Fraction(b[-1])
    for k in range(len(rem) - 1, db - 1, -1):
        if rem[k] == 0:
            continue
        q = rem[k] / lead
        quo[k - db] = q
        for j, cb in enumerate(b):
            rem[j + k - db] -= q * cb
    if any(rem):
        raise ArithmeticError("inexact polynomial division")
    out = []
    for q in quo:
        if q.denominator != 1:
            raise ArithmeticError("inexact polynomial division")
        out.append(q.numerator)
    return _trim(out)


def _pgcd(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Primitive gcd in Z[e] via the Euclidean algorithm over Q."""
    fa = [Fraction(c) for c in _trim(a)]
    fb = [Fraction(c) for c in _trim(b)]
    while fb:
        # fa mod fb
        db = len(fb) - 1
        lead = fb[-1]
        rem = list(fa)
        for k in range(len(rem) - 1, db - 1, -1):
            if rem[k] == 0:
                continue
            q = rem[k] / lead
            for j, cb in enumerate(fb):
                rem[j + k - db] -= q * cb
        while rem and rem[-1] == 0:
            rem.pop()
        fa, fb = fb, rem
    if not fa:
        return ()
    # clear denominators, take the primitive integer part
    lcm = 1
    for c in fa:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    return _pprimitive([int(c * lcm) for c in fa])


def _pval(a: Sequence[int]) -> int:
    for i, c in enumerate(a):
        if c:
            return i
    return -1  # zero polynomial


def _peval(a: Sequence[int], t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * t + c
    return acc


def _coeffs_to_int(coeffs: Iterable[CoeffLike]) -> tuple[tuple[int, ...], int]:
    """Clear denominators; return (integer coefficients, common denominator)."""
    fracs = [Fraction(c) for c in coeffs]
    lcm = 1
    for f in fracs:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    return tuple(int(f * lcm) for f in fracs), lcm


# ---------------------------------------------------------------------------
# the field element
# ---------------------------------------------------------------------------


class EpsRational:
    """An element of the ordered field Q(e), kept in canonical form."""

    __slots__ = ("num", "den")

    def __init__(self, num: Iterable[CoeffLike] | CoeffLike = (),
                 den: Iterable[CoeffLike] | CoeffLike = (1,)):
        if isinstance(num, (int, Fraction)):
            num = (num,)
        if isinstance(den, (int, Fraction)):
            den = (den,)
        inum, dn = _coeffs_to_int(num)
        iden, dd = _coeffs_to_int(den)
        # clearing denominators multiplies num by dn and den by dd; undo crosswise
        n, d = _canonical(_pmul(inum, (dd,)), _pmul(iden, (dn,)))
        object.__setattr__(self, "num", n)
        object.__setattr__(self, "den", d)

    # construction ---------------------------------------------------------

    @classmethod
    def _raw(cls, num: tuple[int, ...], den: tuple[int, ...]) -> "EpsRational":
        out = object.__new__(cls)
        object.__setattr__(out, "num", num)
        object.__setattr__(out, "den", den)
        return out

    @classmethod
    def from_rational(cls, q: CoeffLike) -> "EpsRational":
        q = Fraction(q)
        return cls._raw(_trim((q.numerator,)), (q.denominator,))

    def __setattr__(self, *args):
        raise AttributeError("EpsRational is immutable")

    # basic structure ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_rational(self) -> bool:
        return len(self.num) <= 1 and len(self.den) <= 1

    def as_rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not a plain rational")
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.num[0], self.den[0])

    def valuation(self) -> int:
        """Order of vanishing at e = 0 (negative for infinite elements)."""
        if self.is_zero:
            raise ValueError("valuation of zero is undefined")
        return _pval(self.num) - _pval(self.den)

    @property
    def is_finite(self) -> bool:
        return self.is_zero or self.valuation() >= 0

    # arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(x: ScalarLike) -> "EpsRational":
        if isinstance(x, EpsRational):
            return x
        if isinstance(x, (int, Fraction)):
            return EpsRational.from_rational(x)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: ScalarLike) -> "EpsRational":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if len(self.num) <= 1 and len(self.den) <= 1 and len(o.num) <= 1 and len(o.den) <= 1:
            p = (self.num[0] if self.num else 0) * o.den[0] + (o.num[0] if o.num else 0) * self.den[0]
            q = self.den[0] * o.den[0]
            g = math.gcd(p, q)
            return EpsRational._raw(_trim((p // g,)) if g else (), (q // g,))
        return EpsRational._raw(*_canonical(
            _padd(_pmul(self.num, o.den), _pmul(o.num, self.den)),
            _pmul(self.den, o.den)))

    __radd__ = __add__

    def __neg__(self) -> "EpsRational":
        return EpsRational._raw(_pneg(self.num), self.den)

    def __sub__(self, other: ScalarLike) -> "EpsRational":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: ScalarLike) -> "EpsRational":
        return (-self) + other

    def __mul__(self, other: ScalarLike) -> "EpsRational":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.is_zero or o.is_zero:
            return ZERO
        if len(self.num) <= 1 and len(self.den) <= 1 and len(o.num) <= 1 and len(o.den) <= 1:
            p = self.num[0] * o.num[0]
            q = self.den[0] * o.den[0]
            g = math.gcd(p, q)
            return EpsRational._raw((p // g,), (q // g,))
        return EpsRational._raw(*_canonical(_pmul(self.num, o.num), _pmul(self.den, o.den)))

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "EpsRational":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_zero:
            raise DivisionByZero("division by zero in Q(e)")
        return self * EpsRational._raw(*_canonical(o.den, o.num))

    def __rtruediv__(self, other: ScalarLike) -> "EpsRational":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "EpsRational":
        if k < 0:
            if self.is_zero:
                raise DivisionByZero("division by zero in Q(e)")
            return (ONE / self) ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # order ----------------------------------------------------------------

    def sign(self) -> int:
        """Sign in the field order: -1, 0, or +1."""
        if not self.num:
            return 0
        return 1 if self.num[_pval(self.num)] > 0 else -1

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __lt__(self, other: ScalarLike) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: ScalarLike) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: ScalarLike) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: ScalarLike) -> bool:
        return (self - other).sign() >= 0

    def __bool__(self) -> bool:
        return not self.is_zero

    def __abs__(self) -> "EpsRational":
        return -self if self.sign() < 0 else self

    # analysis -------------------------------------------------------------

    def shadow(self) -> Fraction:
        """Standard part: the unique rational infinitesimally close to self."""
        if self.is_zero:
            return Fraction(0)
        vn, vd = _pval(self.num), _pval(self.den)
        if vn < vd:
            raise InfiniteElement(f"{self} has no finite shadow")
        if vn > vd:
            return Fraction(0)
        return Fraction(self.num[vn], self.den[vd])

    def eval_at(self, t: CoeffLike) -> Fraction:
        """Exact evaluation of the rational function at e = t."""
        t = Fraction(t)
        q = _peval(self.den, t)
        if q == 0:
            raise PoleAtPoint(f"denominator of {self} vanishes at e={t}")
        return _peval(self.num, t) / q

    def sign_stability_threshold(self) -> Fraction:
        """A rational t0 > 0 with sign(eval_at(t)) == sign(self) on 0 < t <= t0.

        Standard lower root bound: a polynomial with lowest nonzero
        coefficient a_m has no root of magnitude below
        |a_m| / (|a_m| + max |a_k|), k > m.
        """
        def radius(p: tuple[int, ...]) -> Fraction:
            if not p:
                return Fraction(1)
            m = _pval(p)
            rest = [abs(c) for c in p[m + 1:]]
            if not rest or max(rest) == 0:
                return Fraction(1)
            return Fraction(abs(p[m]), abs(p[m]) + max(rest))

        return min(radius(self.num), radius(self.den), Fraction(1))

    # presentation ---------------------------------------------------------

    def to_text(self) -> str:
        num = _poly_text(self.num)
        if self.den == (1,):
            return num
        return f"({num})/({_poly_text(self.den)})"

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"EpsRational({self.to_text()!r})"

    def to_json(self) -> dict:
        return {"num": [[c, 1] for c in self.num], "den": [[c, 1] for c in self.den]}

    @classmethod
    def from_json(cls, obj) -> "EpsRational":
        if isinstance(obj, (int, float)):
            if isinstance(obj, float) and not obj.is_integer():
                raise ValueError("float scalar in exact input; use [p, q] pairs")
            return cls.from_rational(int(obj))
        if isinstance(obj, str):
            return cls.from_rational(Fraction(obj))
        if isinstance(obj, (list, tuple)):
            if len(obj) == 2 and all(isinstance(v, int) for v in obj):
                return cls.from_rational(Fraction(obj[0], obj[1]))
            raise ValueError(f"cannot parse scalar {obj!r}")
        if isinstance(obj, dict):
            return cls(num=[Fraction(p, q) for p, q in obj["num"]],
                       den=[Fraction(p, q) for p, q in obj["den"]])
        raise ValueError(f"cannot parse scalar {obj!r}")


def _canonical(num: Sequence[int], den: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    num = _trim(num)
    den = _trim(den)
    if not den:
        raise DivisionByZero("zero denominator in Q(e)")
    if not num:
        return (), (1,)
    cn, cd = _pcontent(num), _pcontent(den)
    pn = tuple(c // cn for c in num)
    pd = tuple(c // cd for c in den)
    g = _pgcd(pn, pd)
    if len(g) > 1:
        pn = _pdivexact(pn, g)
        pd = _pdivexact(pd, g)
    r = math.gcd(cn, cd)
    num = _pmul(pn, (cn // r,))
    den = _pmul(pd, (cd // r,))
    if den[_pval(den)] < 0:
        num, den = _pneg(num), _pneg(den)
    return num, den


def _poly_text(p: tuple[int, ...]) -> str:
    if not p:
        return "0"
    parts = []
    for k, c in enumerate(p):
        if c == 0:
            continue
        if k == 0:
            parts.append(f"{c}")
        else:
            mag = abs(c)
            term = "e" if k == 1 else f"e^{k}"
            if mag != 1:
                term = f"{mag}{term}"
            parts.append(f"+{term}" if c > 0 else f"-{term}")
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


ZERO = EpsRational._raw((), (1,))
ONE = EpsRational._raw((1,), (1,))
EPS = EpsRational._raw((0, 1), (1,))


# spec-shaped operation surface ---------------------------------------------


def arith(a: EpsRational, b: EpsRational, op: str) -> EpsRational:
    """Field arithmetic dispatch; result in canonical form."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def sign(a: ScalarLike) -> int:
    return EpsRational._coerce(a).sign()


def compare(a: ScalarLike, b: ScalarLike) -> int:
    """-1, 0, +1 for a < b, a == b, a > b in the field order."""
    return (EpsRational._coerce(a) - b).sign()


def shadow(a: EpsRational) -> Fraction:
    return EpsRational._coerce(a).shadow()


def eval_at(a: EpsRational, t: CoeffLike) -> Fraction:
    return EpsRational._coerce(a).eval_at(t)


# ---------------------------------------------------------------------------
# complexification
# ---------------------------------------------------------------------------


ComplexLike = Union[int, Fraction, EpsRational, "EpsComplex", complex]


class EpsComplex:
    """Element of Q(e) + i Q(e); conjugation negates the imaginary part."""

    __slots__ = ("re", "im")

    def __init__(self, re: ScalarLike = 0, im: ScalarLike = 0):
        object.__setattr__(self, "re", EpsRational._coerce(re))
        object.__setattr__(self, "im", EpsRational._coerce(im))

    def __setattr__(self, *args):
        raise AttributeError("EpsComplex is immutable")

    @staticmethod
    def coerce(x: ComplexLike) -> "EpsComplex":
        if isinstance(x, EpsComplex):
            return x
        if isinstance(x, (int, Fraction, EpsRational)):
            return EpsComplex(x, 0)
        if isinstance(x, complex):
            if x.real != int(x.real) or x.imag != int(x.imag):
                raise ValueError("only integer-valued complex literals are exact")
            return EpsComplex(int(x.real), int(x.imag))
        raise TypeError(f"cannot coerce {x!r} to EpsComplex")

    @property
    def is_zero(self) -> bool:
        return self.re.is_zero and self.im.is_zero

    @property
    def is_real(self) -> bool:
        return self.im.is_zero

    def conjugate(self) -> "EpsComplex":
        return EpsComplex(self.re, -self.im)

    def __add__(self, other: ComplexLike) -> "EpsComplex":
        o = self.coerce(other)
        return EpsComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "EpsComplex":
        return EpsComplex(-self.re, -self.im)

    def __sub__(self, other: ComplexLike) -> "EpsComplex":
        o = self.coerce(other)
        return EpsComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: ComplexLike) -> "EpsComplex":
        return (-self) + other

    def __mul__(self, other: ComplexLike) -> "EpsComplex":
        o = self.coerce(other)
        if self.im.is_zero and o.im.is_zero:
            return EpsComplex(self.re * o.re, ZERO)
        return EpsComplex(self.re * o.re - self.im * o.im,
                          self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: ComplexLike) -> "EpsComplex":
        o = self.coerce(other)
        if o.is_zero:
            raise DivisionByZero("division by zero in Q(e)+iQ(e)")
        if self.im.is_zero and o.im.is_zero:
            return EpsComplex(self.re / o.re, ZERO)
        norm = o.re * o.re + o.im * o.im
        return EpsComplex((self.re * o.re + self.im * o.im) / norm,
                          (self.im * o.re - self.re * o.im) / norm)

    def __rtruediv__(self, other: ComplexLike) -> "EpsComplex":
        return self.coerce(other) / self

    def __eq__(self, other) -> bool:
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return not self.is_zero

    def abs_squared(self) -> EpsRational:
        return self.re * self.re + self.im * self.im

    def shadow(self) -> tuple[Fraction, Fraction]:
        return self.re.shadow(), self.im.shadow()

    def eval_at(self, t: CoeffLike) -> complex:
        return complex(self.re.eval_at(t)) + 1j * complex(self.im.eval_at(t))

    def __str__(self) -> str:
        if self.im.is_zero:
            return str(self.re)
        return f"{self.re} + i*({self.im})"

    def __repr__(self) -> str:
        return f"EpsComplex({self.re.to_text()!r}, {self.im.to_text()!r})"

    def to_json(self) -> list:
        return [self.re.to_json(), self.im.to_json()]

    @classmethod
    def from_json(cls, obj) -> "EpsComplex":
        """Parse a matrix-file entry.

        Canonical form is [re, im] with each part an EpsRational object.
        Lenient forms: a bare int or "p/q" string (real scalar), or [re, im]
        where the parts are ints / "p/q" strings / scalar objects.
        """
        if isinstance(obj, (list, tuple)):
            if len(obj) != 2:
                raise ValueError(f"matrix entry must be [re, im], got {obj!r}")
            return cls(EpsRational.from_json(obj[0]), EpsRational.from_json(obj[1]))
        return cls(EpsRational.from_json(obj), ZERO)


C_ZERO = EpsComplex(0, 0)
C_ONE = EpsComplex(1, 0)
C_I = EpsComplex(0, 1)
