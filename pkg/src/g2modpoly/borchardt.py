"""The Borchardt mean (genus-2 AGM) and period-matrix recovery.

The iteration on (u0, u1, u2, u3) is

    u0' = (u0 + u1 + u2 + u3) / 4
    uk' = (v0 vk + vl vm) / 2     {k, l, m} = {1, 2, 3}

with canonical square roots vk of uk: |v0 - vk| <= |v0 + vk|, ties broken
by Im(vk/v0) > 0.  The index pairing is characteristic addition (XOR on
the two-bit vectors b in {0,1}^2), which is what the duplication formula
produces.  B2(b1(tau), b2(tau), b3(tau)) = 1/theta_0^2(tau) on the
fundamental domain; the same identity applied to three rotated quotient
triples yields tau1, tau2 and tau3^2 - tau1*tau2.
"""

import math

import gmpy2
from gmpy2 import mpc, mpfr

from . import siegel
from .errors import BranchAmbiguousError, StallError, VanishingDenominatorError
from .precision import to_mpc


def _canonical_sqrt(u, v0, ctx):
    w = gmpy2.sqrt(to_mpc(u))
    dm = abs(v0 - w)
    dp = abs(v0 + w)
    if dm > dp:
        return -w
    if dp - dm <= mpfr(2) ** (-ctx.n_bits + 8) * max(dm, dp):
        # near-tie: prefer Im(w/v0) > 0
        if (w / v0).imag < 0:
            return -w
    return w


def borchardt_mean(z1, z2, z3, ctx, return_iterations=False):
    """B2(z1, z2, z3) starting from (1, z1, z2, z3)."""
    with ctx.workprec():
        u = [to_mpc(1), to_mpc(z1), to_mpc(z2), to_mpc(z3)]
        limit = 4 * int(math.log2(ctx.n_bits)) + 64
        tol = mpfr(2) ** (-ctx.n_bits)
        iters = 0
        for _ in range(limit):
            spread = max(abs(u[k] - u[0]) for k in (1, 2, 3))
            if spread <= tol * abs(u[0]):
                break
            v0 = gmpy2.sqrt(u[0])
            v = [v0] + [_canonical_sqrt(u[k], v0, ctx) for k in (1, 2, 3)]
            u = [(u[0] + u[1] + u[2] + u[3]) / 4,
                 (v[0] * v[1] + v[2] * v[3]) / 2,
                 (v[0] * v[2] + v[1] * v[3]) / 2,
                 (v[0] * v[3] + v[1] * v[2]) / 2]
            iters += 1
        else:
            raise StallError(f"no contraction after {limit} iterations")
        if return_iterations:
            return u[0], iters
        return u[0]


def recover_tau(b, ctx):
    """Fundamental-domain period matrix from the squared theta quotients.

    b: dict i -> theta_i^2(tau)/theta_0^2(tau) for the ten even i.
    Valid when the quotients come from some tau in F_2."""
    with ctx.workprec():
        t0sq = 1 / borchardt_mean(b[1], b[2], b[3], ctx)
        th = {i: b[i] * t0sq for i in b}
        th[0] = t0sq
        small = mpfr(2) ** (-ctx.n_bits // 2)
        scale = max(abs(th[i]) for i in th)
        for i in (0, 4, 8):
            if abs(th[i]) < small * scale:
                raise VanishingDenominatorError(
                    f"theta_{i}^2 vanishes; recovery undefined")
        I = mpc(0, 1)
        tau1 = I / (th[4] * borchardt_mean(
            th[0] / th[4], th[6] / th[4], th[2] / th[4], ctx))
        tau2 = I / (th[8] * borchardt_mean(
            th[9] / th[8], th[0] / th[8], th[1] / th[8], ctx))
        tau3sq = tau1 * tau2 + 1 / (th[0] * borchardt_mean(
            th[8] / th[0], th[4] / th[0], th[12] / th[0], ctx))
        tau3 = gmpy2.sqrt(tau3sq)
        branch_tol = mpfr(2) ** (-ctx.n_bits // 4)
        if abs(tau3) > branch_tol and abs(tau3.imag) < branch_tol * abs(tau3):
            raise BranchAmbiguousError(
                "Im(tau3) too small to pick the square-root branch")
        if tau3.imag < 0:
            tau3 = -tau3
        return siegel.PeriodMatrix(tau1, tau2, tau3)
