"""Scalar field contexts backing all payload and beamforming arithmetic.

Two interchangeable contexts are provided. ``PrimeField`` does exact
arithmetic on integers modulo a prime, so every delivery claim can be
checked as a plain equality. ``ComplexField`` models the same linear
network over complex floating point, with explicit tolerances standing
in for exactness. A context owns every arithmetic decision (dtype,
inversion, zero tests, equality), so no other module branches on the
mode. Values are plain numpy arrays; a single computation must stay
within one context.
"""

from __future__ import annotations

import math

import numpy as np

# Largest allowed prime. Keeps a*b below 2**58 so that int64 matrix
# products with inner dimension up to 32 cannot overflow.
_MAX_PRIME = (1 << 29) - 1


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, int(math.isqrt(n)) + 1):
        if n % q == 0:
            return False
    return True


class PrimeField:
    """Arithmetic modulo a prime p, on int64 numpy arrays.

    Elements are canonical residues in [0, p). Matrix products assume
    inner dimensions at desk scale (<= 32); the prime cap above makes
    them overflow-free in int64.
    """

    mode = "gf"
    dtype = np.int64

    def __init__(self, p: int = 65537):
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        if p > _MAX_PRIME:
            raise ValueError(f"prime {p} too large for exact int64 arithmetic")
        self.p = p

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("gf", self.p))

    def convert(self, a) -> np.ndarray:
        return np.asarray(a, dtype=np.int64) % self.p

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def coeff(self, c: int) -> int:
        """Map a small signed integer coefficient into the field."""
        return c % self.p

    def add(self, a, b) -> np.ndarray:
        return (np.asarray(a) + np.asarray(b)) % self.p

    def sub(self, a, b) -> np.ndarray:
        return (np.asarray(a) - np.asarray(b)) % self.p

    def neg(self, a) -> np.ndarray:
        return (-np.asarray(a)) % self.p

    def mul(self, a, b) -> np.ndarray:
        return (np.asarray(a) * np.asarray(b)) % self.p

    def matmul(self, a, b) -> np.ndarray:
        return (np.asarray(a) @ np.asarray(b)) % self.p

    def inv(self, x) -> int:
        """Multiplicative inverse of a scalar; raises ZeroDivisionError on 0."""
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero in GF(p)")
        return pow(x, -1, self.p)

    def is_zero(self, x) -> bool:
        return int(x) % self.p == 0

    def equal(self, a, b) -> bool:
        """Exact element-wise equality of two arrays."""
        return bool(np.array_equal(self.convert(a), self.convert(b)))

    # Exactness makes the decode-success test identical to equality.
    close = equal

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Uniform symbols in [0, p), e.g. library contents."""
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def sample_channel(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Uniform nonzero coefficients in [1, p), e.g. channel entries."""
        return rng.integers(1, self.p, size=shape, dtype=np.int64)


class ComplexField:
    """Complex floating-point arithmetic with explicit tolerances.

    pivot_rtol: relative pivot threshold for rank decisions.
    zero_atol:  residual bound accepted as zero (beamformer contracts).
    decode_atol: max-abs deviation accepted as a successful decode.
    Sized for well-conditioned random channels at desk-scale dimensions.
    """

    mode = "complex"
    dtype = np.complex128

    pivot_rtol = 1e-10
    zero_atol = 1e-9
    decode_atol = 1e-6

    # Below this magnitude a scalar is treated as not invertible.
    _inv_floor = 1e-12

    def __repr__(self) -> str:
        return "ComplexField()"

    def __eq__(self, other) -> bool:
        return isinstance(other, ComplexField)

    def __hash__(self) -> int:
        return hash("complex")

    def convert(self, a) -> np.ndarray:
        out = np.asarray(a, dtype=np.complex128)
        if not (np.all(np.isfinite(out.real)) and np.all(np.isfinite(out.imag))):
            raise ValueError("non-finite value entering complex field context")
        return out

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.complex128)

    def coeff(self, c: int) -> complex:
        return complex(c)

    def add(self, a, b) -> np.ndarray:
        return np.asarray(a) + np.asarray(b)

    def sub(self, a, b) -> np.ndarray:
        return np.asarray(a) - np.asarray(b)

    def neg(self, a) -> np.ndarray:
        return -np.asarray(a)

    def mul(self, a, b) -> np.ndarray:
        return np.asarray(a) * np.asarray(b)

    def matmul(self, a, b) -> np.ndarray:
        return np.asarray(a) @ np.asarray(b)

    def inv(self, x) -> complex:
        x = complex(x)
        if abs(x) < self._inv_floor:
            raise ZeroDivisionError("inverse of (numerically) zero scalar")
        return 1.0 / x

    def is_zero(self, x) -> bool:
        return abs(complex(x)) <= self.zero_atol

    def equal(self, a, b) -> bool:
        return bool(np.array_equal(np.asarray(a), np.asarray(b)))

    def close(self, a, b) -> bool:
        """Decode-success comparison at decode_atol, max-abs."""
        diff = np.asarray(a) - np.asarray(b)
        return bool(np.max(np.abs(diff), initial=0.0) <= self.decode_atol)

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        re = rng.standard_normal(shape)
        im = rng.standard_normal(shape)
        return (re + 1j * im) / np.sqrt(2.0)

    # Channel entries and payload symbols share the CN(0,1) draw.
    sample_channel = sample


FieldContext = PrimeField | ComplexField


def make_field(mode: str, prime: int = 65537) -> FieldContext:
    """Build a field context from a CLI-style mode tag."""
    if mode == "gf":
        return PrimeField(prime)
    if mode == "complex":
        return ComplexField()
    raise ValueError(f"unknown field mode {mode!r} (expected 'gf' or 'complex')")
