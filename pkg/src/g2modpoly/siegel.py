"""Points of the Siegel upper half-space H_2 and reduction into the
fundamental domain F_2.

F_2 is cut out by three conditions: |Re| <= 1/2 entrywise, Im Minkowski
reduced (0 <= 2*Im tau3 <= Im tau1 <= Im tau2), and |det(C*Omega+D)| >= 1
over a finite candidate set of bottom block pairs (C, D).  The candidate
set used here is a superset of Gottschling's: all completable pairs with
entries in {-1, 0, 1}, deduplicated by left unimodular equivalence.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

from . import symplectic as sp
from .errors import NonTerminationError
from .precision import to_mpc


@dataclass(frozen=True)
class PeriodMatrix:
    """Omega = (tau1 tau3; tau3 tau2) with Im Omega positive definite."""

    tau1: object
    tau2: object
    tau3: object

    def __post_init__(self):
        y1, y2, y3 = self.tau1.imag, self.tau2.imag, self.tau3.imag
        if not (y1 > 0 and y1 * y2 - y3 * y3 > 0):
            raise ValueError("imaginary part not positive definite")

    def triple(self):
        return self.tau1, self.tau2, self.tau3

    def det_im(self):
        return self.tau1.imag * self.tau2.imag - self.tau3.imag ** 2

    def scaled(self, c):
        return PeriodMatrix(self.tau1 * c, self.tau2 * c, self.tau3 * c)


@dataclass(frozen=True)
class ReductionResult:
    omega_reduced: PeriodMatrix
    gamma: tuple
    steps: int


def minkowski_reduce(y1, y2, y3):
    """Minkowski reduction of Y = (y1 y3; y3 y2) > 0.

    Returns (y1', y2', y3', U) with Y' = U^t Y U, 0 <= 2*y3' <= y1' <= y2'."""
    U = ((1, 0), (0, 1))

    def umul(U, V):
        return ((U[0][0] * V[0][0] + U[0][1] * V[1][0], U[0][0] * V[0][1] + U[0][1] * V[1][1]),
                (U[1][0] * V[0][0] + U[1][1] * V[1][0], U[1][0] * V[0][1] + U[1][1] * V[1][1]))

    for _ in range(10000):
        # shear: subtract r copies of the first vector from the second
        r = int(gmpy2.rint_round(y3 / y1))
        if r:
            V = ((1, -r), (0, 1))
            y2 = y2 - 2 * r * y3 + r * r * y1
            y3 = y3 - r * y1
            U = umul(U, V)
        if y1 > y2:
            V = ((0, 1), (1, 0))
            y1, y2 = y2, y1
            U = umul(U, V)
            continue
        break
    else:
        raise NonTerminationError("Minkowski reduction did not settle")
    if y3 < 0:
        V = ((-1, 0), (0, 1))
        y3 = -y3
        U = umul(U, V)
    return y1, y2, y3, U


@lru_cache(maxsize=None)
def _det_candidates():
    """Completable bottom block pairs (C, D), entries in {-1,0,1}, C != 0,
    C*D^t symmetric, deduplicated by left unimodular equivalence; each with
    one symplectic completion."""
    units = [U for U in (tuple(map(tuple, u)) for u in
                         itertools.product(itertools.product((-1, 0, 1), repeat=2), repeat=2))
             if U[0][0] * U[1][1] - U[0][1] * U[1][0] in (1, -1)]

    def umulrow(U, C):
        return tuple(tuple(U[i][0] * C[0][j] + U[i][1] * C[1][j] for j in range(2))
                     for i in range(2))

    seen = set()
    out = []
    vals = (-1, 0, 1)
    for c in itertools.product(vals, repeat=4):
        C = ((c[0], c[1]), (c[2], c[3]))
        if C == ((0, 0), (0, 0)):
            continue
        for d in itertools.product(vals, repeat=4):
            D = ((d[0], d[1]), (d[2], d[3]))
            # C D^t symmetric
            if (C[0][0] * D[1][0] + C[0][1] * D[1][1]
                    != C[1][0] * D[0][0] + C[1][1] * D[0][1]):
                continue
            key = min((umulrow(U, C), umulrow(U, D)) for U in units)
            if key in seen:
                continue
            gamma = _complete_symplectic(C, D)
            if gamma is None:
                continue
            seen.add(key)
            out.append((C, D, gamma))
    return tuple(out)


def _completable(C, D):
    """A pair of bottom rows extends to Sp4(Z) iff C*D^t is symmetric and
    the 2x2 minors of (C | D) are coprime."""
    import math
    r0 = (C[0][0], C[0][1], D[0][0], D[0][1])
    r1 = (C[1][0], C[1][1], D[1][0], D[1][1])
    minors = [r0[i] * r1[j] - r0[j] * r1[i]
              for i in range(4) for j in range(i + 1, 4)]
    return math.gcd(*minors) == 1


def _complete_symplectic(C, D):
    if not _completable(C, D):
        return None
    detC = C[0][0] * C[1][1] - C[0][1] * C[1][0]
    small = (-1, 0, 1, 2, -2)
    if detC in (1, -1):
        # solve tC*B = tA*D - I for B, then check the symmetry conditions
        Cti = tuple(tuple(x * detC for x in row)
                    for row in ((C[1][1], -C[1][0]), (-C[0][1], C[0][0])))
        for a in itertools.product(small, repeat=4):
            A = ((a[0], a[1]), (a[2], a[3]))
            tAD = ((A[0][0] * D[0][0] + A[1][0] * D[1][0], A[0][0] * D[0][1] + A[1][0] * D[1][1]),
                   (A[0][1] * D[0][0] + A[1][1] * D[1][0], A[0][1] * D[0][1] + A[1][1] * D[1][1]))
            R = ((tAD[0][0] - 1, tAD[0][1]), (tAD[1][0], tAD[1][1] - 1))
            B = ((Cti[0][0] * R[0][0] + Cti[0][1] * R[1][0], Cti[0][0] * R[0][1] + Cti[0][1] * R[1][1]),
                 (Cti[1][0] * R[0][0] + Cti[1][1] * R[1][0], Cti[1][0] * R[0][1] + Cti[1][1] * R[1][1]))
            M = sp.from_blocks(A, B, C, D)
            if sp.is_symplectic(M):
                return M
        return None
    for a in itertools.product(small, repeat=4):
        A = ((a[0], a[1]), (a[2], a[3]))
        for b in itertools.product((-1, 0, 1), repeat=4):
            B = ((b[0], b[1]), (b[2], b[3]))
            # cheap necessary check: tA*D - tC*B = I, entrywise with early exit
            if (A[0][0] * D[0][0] + A[1][0] * D[1][0]
                    - C[0][0] * B[0][0] - C[1][0] * B[1][0] != 1):
                continue
            if (A[0][1] * D[0][1] + A[1][1] * D[1][1]
                    - C[0][1] * B[0][1] - C[1][1] * B[1][1] != 1):
                continue
            M = sp.from_blocks(A, B, C, D)
            if sp.is_symplectic(M):
                return M
    return None


def _min_det_candidate(om):
    """Smallest |det(C*Omega+D)| over the candidate set, with its gamma."""
    best = None
    best_gamma = None
    for C, D, gamma in _det_candidates():
        v = abs(sp.cd_det(gamma, om.tau1, om.tau2, om.tau3))
        if best is None or v < best:
            best, best_gamma = v, gamma
    return best, best_gamma


def _apply(gamma, om, ctx=None):
    t1, t2, t3 = sp.act(gamma, om.tau1, om.tau2, om.tau3, ctx)
    return PeriodMatrix(t1, t2, t3)


def reduce_to_fundamental(om, ctx=None, max_steps=1000):
    """Reduce Omega into F_2; returns (reduced point, gamma, step count)."""
    gamma = sp.I4
    half = mpfr(1) / 2
    for step in range(max_steps):
        # Minkowski-reduce the imaginary part
        _, _, _, U = minkowski_reduce(om.tau1.imag, om.tau2.imag, om.tau3.imag)
        if U != ((1, 0), (0, 1)):
            Ut = ((U[0][0], U[1][0]), (U[0][1], U[1][1]))
            Uinv_t = ((U[1][1], -U[1][0]), (-U[0][1], U[0][0]))
            det = U[0][0] * U[1][1] - U[0][1] * U[1][0]
            Uinv = tuple(tuple(x * det for x in row)
                         for row in ((U[1][1], -U[0][1]), (-U[1][0], U[0][0])))
            g = sp.from_blocks(Ut, ((0, 0), (0, 0)), ((0, 0), (0, 0)), Uinv)
            om = _apply(g, om, ctx)
            gamma = sp.mat_mul(g, gamma)
        # translate real parts into [-1/2, 1/2]
        s1 = int(gmpy2.rint_round(om.tau1.real))
        s2 = int(gmpy2.rint_round(om.tau2.real))
        s3 = int(gmpy2.rint_round(om.tau3.real))
        if s1 or s2 or s3:
            g = sp.from_blocks(((1, 0), (0, 1)), ((-s1, -s3), (-s3, -s2)),
                               ((0, 0), (0, 0)), ((1, 0), (0, 1)))
            om = _apply(g, om, ctx)
            gamma = sp.mat_mul(g, gamma)
        # condition 3
        v, g = _min_det_candidate(om)
        if v >= 1 - mpfr(2) ** -40:
            return ReductionResult(om, gamma, step + 1)
        om = _apply(g, om, ctx)
        gamma = sp.mat_mul(g, gamma)
    raise NonTerminationError("fundamental-domain reduction did not settle")


def is_in_fundamental(om, tol=None):
    if tol is None:
        tol = mpfr(2) ** -40
    y1, y2, y3 = om.tau1.imag, om.tau2.imag, om.tau3.imag
    if not (abs(om.tau1.real) <= half_plus(tol) and abs(om.tau2.real) <= half_plus(tol)
            and abs(om.tau3.real) <= half_plus(tol)):
        return False
    if not (-tol <= y3 and 2 * y3 <= y1 + tol and y1 <= y2 + tol):
        return False
    v, _ = _min_det_candidate(om)
    return v >= 1 - tol


def half_plus(tol):
    return mpfr(1) / 2 + tol


def random_fundamental_point(rng, ctx=None, margin=0.05):
    """Random interior point of F_2 (rejection sampling)."""
    while True:
        y1 = 1 + rng.uniform(margin, 1.0)
        y2 = y1 + rng.uniform(margin, 1.0)
        y3 = rng.uniform(margin, y1 / 2 - margin)
        x1 = rng.uniform(-0.5 + margin, 0.5 - margin)
        x2 = rng.uniform(-0.5 + margin, 0.5 - margin)
        x3 = rng.uniform(-0.5 + margin, 0.5 - margin)
        om = PeriodMatrix(to_mpc(complex(x1, y1)), to_mpc(complex(x2, y2)),
                          to_mpc(complex(x3, y3)))
        if is_in_fundamental(om):
            return om
