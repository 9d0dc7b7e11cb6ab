"""Genus-2 theta constants with half-integer characteristics.

Index convention: theta_i with i = b0 + 2*b1 + 4*a0 + 8*a1 for
characteristic vectors a, b in {0,1}^2 (the actual characteristic is
(a/2, b/2)).  The ten even indices are P = {0,1,2,3,4,6,8,9,12,15};
the six odd thetas vanish identically.

Three layers:
  * theta_all: direct lattice sum at a (near-)reduced point;
  * duplication: squared thetas at Omega from the four fundamental
    thetas at Omega/2;
  * theta_action_of / theta_quotients_anywhere: functional-equation
    transport of theta quotients from the fundamental domain to any
    point of H_2.  Only quotients are transported, so the eighth root
    of unity zeta_gamma and the square-root branch cancel and are
    never computed.
"""

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from . import siegel
from . import symplectic as sp
from .errors import SlowConvergenceError, VanishingDenominatorError
from .precision import to_mpc

EVEN = (0, 1, 2, 3, 4, 6, 8, 9, 12, 15)


def char_of(i):
    """(a, b) vectors in {0,1}^2 for index i."""
    return ((i >> 2) & 1, (i >> 3) & 1), (i & 1, (i >> 1) & 1)


def index_of(a, b):
    return b[0] + 2 * b[1] + 4 * a[0] + 8 * a[1]


def is_even(i):
    a, b = char_of(i)
    return (a[0] * b[0] + a[1] * b[1]) % 2 == 0


def _lambda_min(om):
    y1, y2, y3 = om.tau1.imag, om.tau2.imag, om.tau3.imag
    return (y1 + y2 - gmpy2.sqrt((y1 - y2) ** 2 + 4 * y3 * y3)) / 2


def truncation_radius(om, bits):
    """Smallest M with the lattice tail below 2^-bits for |m|_inf <= M."""
    lam = _lambda_min(om)
    if lam <= 0:
        raise SlowConvergenceError("imaginary part not positive definite")
    M = int(math.ceil(2 * math.sqrt(bits * math.log(2) / (math.pi * float(lam))))) + 3
    if M > 4 * math.sqrt(bits) + 8:
        raise SlowConvergenceError(
            f"truncation radius {M} too large; reduce the point first")
    return M


def theta_all(om, ctx):
    """All sixteen theta constants at om by direct series.

    om should be reduced (or at least have Im om not too small).  Odd
    indices come back as exact zero.  One pass over the lattice feeds
    all characteristics."""
    with ctx.workprec():
        bits = ctx.total_bits
        M = truncation_radius(om, bits)
        ipi4 = mpc(0, gmpy2.const_pi() / 4)
        x1 = gmpy2.exp(ipi4 * om.tau1)
        x2 = gmpy2.exp(ipi4 * om.tau2)
        x3 = gmpy2.exp(2 * ipi4 * om.tau3)
        # p[k] = x^(k^2) by the recurrence x^(k^2) = x^((k-1)^2) * x^(2k-1)
        def sq_powers(x):
            out = [to_mpc(1)]
            odd = x
            xx = x * x
            for _ in range(1, M + 1):
                out.append(out[-1] * odd)
                odd = odd * xx
            return out
        p1 = sq_powers(x1)
        p2 = sq_powers(x2)
        x3p = [to_mpc(1)]
        x3n = [to_mpc(1)]
        x3i = 1 / x3
        for _ in range(M * M):
            x3p.append(x3p[-1] * x3)
            x3n.append(x3n[-1] * x3i)
        I = mpc(0, 1)
        rot = (to_mpc(1), I, to_mpc(-1), -I)
        acc = [to_mpc(0) for _ in range(16)]
        for m1 in range(-M, M + 1):
            a0 = m1 & 1
            q1 = p1[abs(m1)]
            for m2 in range(-M, M + 1):
                a1 = m2 & 1
                j = m1 * m2
                t = q1 * p2[abs(m2)] * (x3p[j] if j >= 0 else x3n[-j])
                base = 4 * a0 + 8 * a1
                # b = (b0, b1): phase i^(m1*b0 + m2*b1)
                acc[base] += t
                acc[base + 1] += rot[m1 % 4] * t
                acc[base + 2] += rot[m2 % 4] * t
                acc[base + 3] += rot[(m1 + m2) % 4] * t
        for i in range(16):
            if not is_even(i):
                acc[i] = to_mpc(0)
        return acc


def theta_series(i, om, ctx):
    return theta_all(om, ctx)[i]


def duplication(th0, th1, th2, th3, ctx=None):
    """Squared thetas at Omega from theta_0..3 at Omega/2.

    Returns a dict i -> theta_i^2(Omega) for i in EVEN."""
    f = [th0, th1, th2, th3]
    out = {}
    for i in EVEN:
        a, b = char_of(i)
        s = to_mpc(0)
        for b1 in ((0, 0), (1, 0), (0, 1), (1, 1)):
            b2 = ((b1[0] + b[0]) % 2, (b1[1] + b[1]) % 2)
            sign = -1 if (a[0] * b1[0] + a[1] * b1[1]) % 2 else 1
            s += sign * f[b1[0] + 2 * b1[1]] * f[b2[0] + 2 * b2[1]]
        out[i] = s / 4
    return out


@dataclass(frozen=True)
class ThetaAction:
    """theta_i(gamma*Omega) = zeta_gamma*sqrt(det(C Omega + D))
    * zeta8^upow[i] * theta_perm[i](Omega)."""

    gamma: tuple
    perm: tuple
    upow: tuple

    def quotient_power(self, i):
        """Power of zeta8 in theta_i/theta_0 transport (always even)."""
        return (self.upow[i] - self.upow[0]) % 8


def theta_action_of(gamma):
    """Characteristic permutation and phase of the functional equation."""
    A, B, C, D = sp.blocks(gamma)

    def tmulv(X, v):
        # transpose(X) * v
        return (X[0][0] * v[0] + X[1][0] * v[1], X[0][1] * v[0] + X[1][1] * v[1])

    def mulv(X, v):
        return (X[0][0] * v[0] + X[0][1] * v[1], X[1][0] * v[0] + X[1][1] * v[1])

    # e' = (tA C)_0 / 2, e'' = (tD B)_0 / 2; track doubled vectors
    E1 = (A[0][0] * C[0][0] + A[1][0] * C[1][0], A[0][1] * C[0][1] + A[1][1] * C[1][1])
    E2 = (D[0][0] * B[0][0] + D[1][0] * B[1][0], D[0][1] * B[0][1] + D[1][1] * B[1][1])
    AtB = ((A[0][0] * B[0][0] + A[0][1] * B[0][1], A[0][0] * B[1][0] + A[0][1] * B[1][1]),
           (A[1][0] * B[0][0] + A[1][1] * B[0][1], A[1][0] * B[1][0] + A[1][1] * B[1][1]))
    CtD = ((C[0][0] * D[0][0] + C[0][1] * D[0][1], C[0][0] * D[1][0] + C[0][1] * D[1][1]),
           (C[1][0] * D[0][0] + C[1][1] * D[0][1], C[1][0] * D[1][0] + C[1][1] * D[1][1]))
    BtC = ((B[0][0] * C[0][0] + B[0][1] * C[0][1], B[0][0] * C[1][0] + B[0][1] * C[1][1]),
           (B[1][0] * C[0][0] + B[1][1] * C[0][1], B[1][0] * C[1][0] + B[1][1] * C[1][1]))

    perm = [0] * 16
    upow = [0] * 16
    for i in range(16):
        alpha, beta = char_of(i)
        # doubled image characteristics: 2a' = tA*alpha + tC*beta + E1
        A2 = tuple(tmulv(A, alpha)[k] + tmulv(C, beta)[k] + E1[k] for k in range(2))
        B2 = tuple(tmulv(B, alpha)[k] + tmulv(D, beta)[k] + E2[k] for k in range(2))
        an = (A2[0] % 2, A2[1] % 2)
        bn = (B2[0] % 2, B2[1] % 2)
        s_shift = ((A2[0] - an[0]) // 2, (A2[1] - an[1]) // 2)
        t_shift = ((B2[0] - bn[0]) // 2, (B2[1] - bn[1]) // 2)
        # phase exponent in units of pi/4 (powers of zeta8)
        qa = mulv(AtB, alpha)
        u = -(alpha[0] * qa[0] + alpha[1] * qa[1])
        qb = mulv(CtD, beta)
        u -= beta[0] * qb[0] + beta[1] * qb[1]
        qc = mulv(BtC, beta)
        u -= 2 * (alpha[0] * qc[0] + alpha[1] * qc[1])
        u -= 2 * (A2[0] * E2[0] + A2[1] * E2[1])
        # integer characteristic shift: theta[a+s, b+t] = exp(2 i pi a.t) theta[a, b]
        u += 4 * ((an[0] * t_shift[0] + an[1] * t_shift[1]) % 2)
        perm[i] = index_of(an, bn)
        upow[i] = u % 8
    return ThetaAction(gamma, tuple(perm), tuple(upow))


def zeta8(ctx):
    with ctx.workprec():
        c = gmpy2.const_pi() / 4
        return mpc(gmpy2.cos(c), gmpy2.sin(c))


def theta_quotients_anywhere(om, ctx):
    """Quotients theta_i(om)/theta_0(om), i in EVEN, for any om in H_2.

    Reduces om to the fundamental domain, evaluates there, transports the
    quotients back.  Returns (dict i -> quotient, ReductionResult)."""
    with ctx.workprec():
        red = siegel.reduce_to_fundamental(om, ctx)
        th = theta_all(red.omega_reduced, ctx)
        gamma_back = sp.sp_inverse(red.gamma)
        action = theta_action_of(gamma_back)
        z8 = zeta8(ctx)
        den = th[action.perm[0]]
        scale = max(abs(t) for t in th)
        if abs(den) < ctx.half_tol() * scale:
            raise VanishingDenominatorError(
                "theta_0 transported denominator vanishes (diagonal locus)")
        out = {}
        for i in EVEN:
            q = th[action.perm[i]] / den
            out[i] = q * z8 ** action.quotient_power(i)
        return out, red
