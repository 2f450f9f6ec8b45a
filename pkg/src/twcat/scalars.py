"""Exact ground-field arithmetic.

Two fields are supported: the rationals (``"Q"``, backed by python-flint's
``fmpq``) and prime fields (``"Fp:<p>"`` with ``p < 2**31``,
backed by Python ints reduced modulo ``p``).  Matrices are numpy arrays of
``dtype=object`` holding field elements; all helpers here keep them reduced.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Iterable, Sequence

import flint
import numpy as np

FIELD_ENV_VAR = "TWCAT_FIELD"
MAX_PRIME = 2**31


class ScalarError(ArithmeticError):
    """Raised for invalid field operations such as inverting zero."""


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


class Field:
    """A prime field or the rationals, with scalar and dense-matrix helpers."""

    def __init__(self, p: int | None = None):
        if p is not None:
            if not (2 <= p < MAX_PRIME) or not _is_prime(p):
                raise ScalarError(f"modulus {p} is not a prime below 2^31")
        self.p = p

    # -- identity -------------------------------------------------------
    @property
    def spec(self) -> str:
        return "Q" if self.p is None else f"Fp:{self.p}"

    def __repr__(self) -> str:
        return f"Field({self.spec!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Field", self.p))

    # -- scalars --------------------------------------------------------
    @property
    def zero(self):
        return _Q0 if self.p is None else 0

    @property
    def one(self):
        return _Q1 if self.p is None else 1

    def __call__(self, x):
        """Coerce an int, Fraction, fmpq or numeric string into the field."""
        if isinstance(x, flint.fmpq):
            if self.p is None:
                return x
            x = Fraction(int(x.p), int(x.q))
        elif isinstance(x, str):
            x = Fraction(x.strip())
        if self.p is None:
            if isinstance(x, Fraction):
                return flint.fmpq(x.numerator, x.denominator)
            return flint.fmpq(int(x))
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ScalarError(f"denominator of {x} vanishes mod {self.p}")
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if a == 0:
            raise ScalarError("inverse of zero")
        if self.p is None:
            return 1 / flint.fmpq(a)
        return pow(int(a), -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def eq(self, a, b) -> bool:
        return self(a) == self(b)

    def sign(self, e: int):
        """(-1)**e as a field element."""
        return self.one if e % 2 == 0 else self.neg(self.one)

    def to_str(self, a) -> str:
        if self.p is None:
            return str(self(a))
        return str(int(a) % self.p)

    # -- matrices -------------------------------------------------------
    def reduce(self, m: np.ndarray) -> np.ndarray:
        if self.p is not None and m.size:
            return np.mod(m, self.p)
        return m

    def matrix(self, rows: Sequence[Sequence], shape: tuple[int, int] | None = None) -> np.ndarray:
        rows = [list(r) for r in rows]
        if shape is None:
            shape = (len(rows), len(rows[0]) if rows else 0)
        m = np.empty(shape, dtype=object)
        for i in range(shape[0]):
            if len(rows[i]) != shape[1]:
                raise ValueError("ragged matrix literal")
            for j in range(shape[1]):
                m[i, j] = self(rows[i][j])
        return m

    def zeros(self, r: int, c: int) -> np.ndarray:
        m = np.empty((r, c), dtype=object)
        m.fill(self.zero)
        return m

    def eye(self, n: int) -> np.ndarray:
        m = self.zeros(n, n)
        for i in range(n):
            m[i, i] = self.one
        return m

    def mm(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return self.reduce(a.dot(b))

    def madd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(a + b)

    def mscale(self, c, a: np.ndarray) -> np.ndarray:
        return self.reduce(a * c)

    @staticmethod
    def is_zero_matrix(m: np.ndarray) -> bool:
        return m.size == 0 or np.count_nonzero(m) == 0

    def random_matrix(self, rng, r: int, c: int, values: Iterable[int] = (-1, 0, 0, 1, 2)) -> np.ndarray:
        vals = list(values)
        return self.matrix([[rng.choice(vals) for _ in range(c)] for _ in range(r)], (r, c))


_Q0 = flint.fmpq(0)
_Q1 = flint.fmpq(1)
QQ = Field(None)


def get_field(spec: str | None = None) -> Field:
    """Parse ``"Q"`` or ``"Fp:<prime>"``; ``None`` consults the environment."""
    if spec is None:
        spec = os.environ.get(FIELD_ENV_VAR, "Q")
    s = spec.strip().strip('"').strip("'")
    if s in ("Q", "QQ"):
        return QQ
    if s.startswith("Fp:"):
        try:
            p = int(s[3:])
        except ValueError as exc:
            raise ScalarError(f"bad field spec {spec!r}") from exc
        return Field(p)
    raise ScalarError(f"bad field spec {spec!r}")
