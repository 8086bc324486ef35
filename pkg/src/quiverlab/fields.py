"""Exact scalar fields: rationals Q, Gaussian rationals Q(i), prime fields F_p.

Every scalar operation is exact, so every downstream comparison is a decision,
never a tolerance.  A field object knows how to build, coerce, serialize and
randomize its scalars; matrices carry a field reference and stay generic.

Serialization forms (used by the JSON interfaces):
    Q      "p/q" or "p"
    Q(i)   ["p/q", "r/s"]         (real part, imaginary part)
    F_p    plain int, modulus announced once in the container header
"""

from __future__ import annotations

from fractions import Fraction

from .errors import WrongField


class GaussianRational:
    """a + b*i with exact rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}+{self.im}i"


class FpScalar:
    """Element of F_p, normalized to 0..p-1."""

    __slots__ = ("val", "p")

    def __init__(self, val, p):
        self.val = val % p
        self.p = p

    def _coerce(self, x):
        if isinstance(x, FpScalar):
            if x.p != self.p:
                raise WrongField(f"mixing F_{self.p} and F_{x.p}")
            return x
        if isinstance(x, int):
            return FpScalar(x, self.p)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpScalar(self.val + o.val, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpScalar(self.val - o.val, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpScalar(o.val - self.val, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpScalar(self.val * o.val, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.val == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return FpScalar(self.val * pow(o.val, self.p - 2, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return FpScalar(-self.val, self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.val == o.val

    def __hash__(self):
        return hash((self.val, self.p))

    def __bool__(self):
        return self.val != 0

    def __repr__(self):
        return f"{self.val}"


class RationalField:
    name = "Q"
    kind = "Q"
    has_conjugation = False

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise WrongField(f"cannot coerce {x!r} into Q")

    def parse(self, obj):
        if isinstance(obj, str):
            return Fraction(obj)
        if isinstance(obj, int):
            return Fraction(obj)
        raise WrongField(f"bad rational literal {obj!r}")

    def dump(self, x):
        return str(x)

    def random(self, rng, height=10):
        return Fraction(rng.randint(-height, height), rng.randint(1, height))

    def random_nonzero(self, rng, height=10):
        while True:
            x = self.random(rng, height)
            if x != 0:
                return x

    def conj(self, x):
        raise WrongField("conjugation is only defined over Q(i)")

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return "QQ"


class GaussianRationalField:
    name = "Q(i)"
    kind = "Qi"
    has_conjugation = True

    def zero(self):
        return GaussianRational(0)

    def one(self):
        return GaussianRational(1)

    def i(self):
        return GaussianRational(0, 1)

    def from_int(self, n):
        return GaussianRational(n)

    def coerce(self, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x)
        raise WrongField(f"cannot coerce {x!r} into Q(i)")

    def parse(self, obj):
        if isinstance(obj, (list, tuple)) and len(obj) == 2:
            return GaussianRational(Fraction(obj[0]), Fraction(obj[1]))
        if isinstance(obj, (str, int)):
            return GaussianRational(Fraction(obj))
        raise WrongField(f"bad Gaussian rational literal {obj!r}")

    def dump(self, x):
        return [str(x.re), str(x.im)]

    def random(self, rng, height=10):
        return GaussianRational(
            Fraction(rng.randint(-height, height), rng.randint(1, height)),
            Fraction(rng.randint(-height, height), rng.randint(1, height)),
        )

    def random_nonzero(self, rng, height=10):
        while True:
            x = self.random(rng, height)
            if x != self.zero():
                return x

    def conj(self, x):
        return self.coerce(x).conjugate()

    def __eq__(self, other):
        return isinstance(other, GaussianRationalField)

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return "QQI"


def _is_prime(p):
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


class PrimeField:
    kind = "Fp"
    has_conjugation = False

    def __init__(self, p):
        if not _is_prime(p):
            raise WrongField(f"{p} is not prime")
        self.p = p
        self.name = f"Fp:{p}"

    def zero(self):
        return FpScalar(0, self.p)

    def one(self):
        return FpScalar(1, self.p)

    def from_int(self, n):
        return FpScalar(n, self.p)

    def coerce(self, x):
        if isinstance(x, FpScalar):
            if x.p != self.p:
                raise WrongField(f"element of F_{x.p} used in F_{self.p}")
            return x
        if isinstance(x, int):
            return FpScalar(x, self.p)
        raise WrongField(f"cannot coerce {x!r} into F_{self.p}")

    def parse(self, obj):
        if isinstance(obj, int):
            return FpScalar(obj, self.p)
        if isinstance(obj, str):
            return FpScalar(int(obj), self.p)
        raise WrongField(f"bad F_{self.p} literal {obj!r}")

    def dump(self, x):
        return x.val

    def random(self, rng, height=None):
        return FpScalar(rng.randrange(self.p), self.p)

    def random_nonzero(self, rng, height=None):
        return FpScalar(rng.randrange(1, self.p), self.p)

    def conj(self, x):
        raise WrongField("conjugation is only defined over Q(i)")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()
QQI = GaussianRationalField()


def field_from_name(name):
    """Inverse of `field.name`, used by the JSON loaders."""
    if name == "Q":
        return QQ
    if name == "Q(i)":
        return QQI
    if name.startswith("Fp:"):
        return PrimeField(int(name.split(":", 1)[1]))
    raise WrongField(f"unknown field name {name!r}")
