"""Working-precision bookkeeping on top of gmpy2 (MPFR/MPC).

All multiprecision values in the package are gmpy2.mpfr / gmpy2.mpc bound to
a PrecisionContext.  gmpy2 keeps the active precision in a thread-local
context; `workprec` switches it for a block and restores it afterwards.
"""

import contextlib
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr


@dataclass(frozen=True)
class PrecisionContext:
    """Precision settings: working bits N, guard bits, low-precision N'."""

    n_bits: int = 256
    guard_bits: int = 64
    n_low_bits: int = 96

    def __post_init__(self):
        if self.n_bits < 64:
            raise ValueError("n_bits must be >= 64")
        if self.guard_bits < 32:
            raise ValueError("guard_bits must be >= 32")
        if self.n_low_bits >= self.n_bits:
            raise ValueError("n_low_bits must be < n_bits")

    @property
    def total_bits(self):
        return self.n_bits + self.guard_bits

    def doubled(self):
        return PrecisionContext(2 * self.n_bits, self.guard_bits, self.n_low_bits)

    def low(self):
        """Context for verification passes at the low precision N'."""
        return PrecisionContext(max(64, self.n_low_bits), self.guard_bits,
                                max(63, self.n_low_bits - 1))

    def eps(self):
        """Representable relative error at full working precision."""
        with self.workprec():
            return mpfr(2) ** (-self.n_bits)

    def half_tol(self):
        """Loose tolerance 2^(-n_bits/2) used for consistency checks."""
        with self.workprec():
            return mpfr(2) ** (-self.n_bits // 2)

    @contextlib.contextmanager
    def workprec(self, extra_bits=0):
        ctx = gmpy2.get_context()
        saved = ctx.precision
        ctx.precision = self.total_bits + extra_bits
        try:
            yield
        finally:
            ctx.precision = saved


DEFAULT_CTX = PrecisionContext()


@contextlib.contextmanager
def workprec_bits(bits):
    """Raw bit-count variant of PrecisionContext.workprec."""
    ctx = gmpy2.get_context()
    saved = ctx.precision
    ctx.precision = bits
    try:
        yield
    finally:
        ctx.precision = saved


def to_mpc(z):
    """Coerce ints/floats/complex/strings to mpc at the active precision."""
    if isinstance(z, mpc):
        return +z
    if isinstance(z, complex):
        return mpc(mpfr(z.real), mpfr(z.imag))
    return mpc(mpfr(z), mpfr(0))


def to_mpfr(x):
    return mpfr(x)


def mpc_to_complex(z):
    return complex(float(z.real), float(z.imag))
