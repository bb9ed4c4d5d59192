"""Exact ground fields: the rationals (via gmpy2) and prime fields GF(p).

A :class:`Field` is an immutable descriptor.  Its elements are plain Python
objects that support ``+ - * /`` and equality, so the rest of the package can
write arithmetic with operators and never needs to know which field is in use.
There is deliberately no root extraction anywhere.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from gmpy2 import mpq

from .errors import InvariantError, ParseError


class Fp:
    """Residue class modulo a prime ``p``."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise InvariantError(f"mixing GF({self.p}) and GF({other.p})")
            return other.v
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in GF(%d)" % self.p)
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.v == 0:
            raise ZeroDivisionError("division by zero in GF(%d)" % self.p)
        return Fp(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pos__(self):
        return self

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.v == other.v and self.p == other.p
        if isinstance(other, int):
            return (self.v - other) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


_RATIONAL = re.compile(r"^[+-]?\d+(/[+-]?\d+)?$")


@dataclass(frozen=True)
class Field:
    """Descriptor of the ground field: ``Field.Q()`` or ``Field.GF(p)``."""

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind == "q":
            if self.p != 0:
                raise InvariantError("the rational field carries no modulus")
        elif self.kind == "fp":
            if not _is_prime(self.p):
                raise InvariantError(f"modulus {self.p} is not prime")
        else:
            raise InvariantError(f"unknown field kind {self.kind!r}")

    @classmethod
    def Q(cls) -> "Field":
        return cls("q")

    @classmethod
    def GF(cls, p: int) -> "Field":
        return cls("fp", p)

    @classmethod
    def from_descriptor(cls, desc) -> "Field":
        if not isinstance(desc, dict):
            raise ParseError("field descriptor must be an object")
        extra = set(desc) - {"type", "p"}
        if extra:
            raise ParseError(f"unknown field descriptor keys {sorted(extra)}")
        kind = desc.get("type")
        if kind == "q":
            if "p" in desc:
                raise ParseError("rational field takes no 'p'")
            return cls.Q()
        if kind == "fp":
            p = desc.get("p")
            if not isinstance(p, int) or isinstance(p, bool):
                raise ParseError("prime field needs an integer 'p'")
            if not _is_prime(p):
                raise ParseError(f"modulus {p} is not prime")
            return cls.GF(p)
        raise ParseError(f"unknown field type {kind!r}")

    @classmethod
    def from_flag(cls, text: str) -> "Field":
        """Parse the command-line spelling ``q`` or ``fp:P``."""
        if text == "q":
            return cls.Q()
        m = re.fullmatch(r"fp:(\d+)", text)
        if not m:
            raise ParseError(f"bad field flag {text!r}; expected q or fp:P")
        return cls.from_descriptor({"type": "fp", "p": int(m.group(1))})

    def descriptor(self) -> dict:
        if self.kind == "q":
            return {"type": "q"}
        return {"type": "fp", "p": self.p}

    def __str__(self):
        return "Q" if self.kind == "q" else f"GF({self.p})"

    @cached_property
    def zero(self):
        return self(0)

    @cached_property
    def one(self):
        return self(1)

    def __call__(self, x):
        """Coerce an int (or an element of this field) into the field."""
        if self.kind == "q":
            if isinstance(x, Fp):
                raise InvariantError("prime-field element used over Q")
            return mpq(x)
        if isinstance(x, Fp):
            if x.p != self.p:
                raise InvariantError(f"GF({x.p}) element used over GF({self.p})")
            return x
        if type(x) is not int and not hasattr(x, "__index__"):
            # rationals map into GF(p) through numerator/denominator
            q = mpq(x)
            return Fp(int(q.numerator), self.p) / Fp(int(q.denominator), self.p)
        return Fp(int(x), self.p)

    def contains(self, x) -> bool:
        if self.kind == "q":
            return type(x) is type(mpq(0))
        return isinstance(x, Fp) and x.p == self.p

    def parse(self, text):
        """Parse the serialized form of a scalar ("3/7", "-2", "5")."""
        if not isinstance(text, str) or not _RATIONAL.match(text.strip()):
            raise ParseError(f"bad scalar {text!r}")
        text = text.strip()
        if self.kind == "q":
            try:
                return mpq(text)
            except ZeroDivisionError:
                raise ParseError(f"zero denominator in {text!r}") from None
        num, _, den = text.partition("/")
        if den and int(den) % self.p == 0:
            raise ParseError(f"denominator of {text!r} vanishes mod {self.p}")
        x = Fp(int(num), self.p)
        return x / Fp(int(den), self.p) if den else x

    def format(self, x) -> str:
        return str(x)

    def random(self, rng):
        """Uniform element; over Q numerator and denominator lie in [-9, 9]."""
        if self.kind == "q":
            den = 0
            while den == 0:
                den = rng.randint(-9, 9)
            return mpq(rng.randint(-9, 9), den)
        return Fp(rng.randrange(self.p), self.p)

    def random_nonzero(self, rng):
        while True:
            x = self.random(rng)
            if x:
                return x
