"""Inversion of invariant maps: from an invariant triple back to a
period matrix.

Two routes:

  * borchardt_fast_path: for theta-quotient targets coming from a
    fundamental-domain point, duplication + the Borchardt mean recover
    Omega in logarithmic time; the result is verified forward and the
    path simply rejects (returns None) when the target's class has no
    fundamental-domain-compatible root choice.
  * invert_invariants: Newton predictor-corrector continuation.  A seed
    point with invariant value v0 is joined to the target by a straight
    segment in invariant space; each step solves the 3x3 complex Newton
    system with the analytic Jacobian (termwise-differentiated theta
    series).  Tracking runs at the low precision, the final polish at
    full precision.  Deterministic: a fixed pool of 16 seeds, tried in
    order.
"""

import random
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from . import borchardt, invariants, siegel, theta
from .errors import (G2Error, PathFailureError, PrecisionLossError,
                     SingularError, SingularTargetError)
from .precision import to_mpc


@dataclass(frozen=True)
class InversionResult:
    omega: siegel.PeriodMatrix
    residual: object
    path_length: int
    method: str


class Jet:
    """Forward-mode derivative carrier: value + gradient wrt (t1, t2, t3)."""

    __slots__ = ("v", "d")

    def __init__(self, v, d=(0, 0, 0)):
        self.v = v
        self.d = d

    def __add__(self, o):
        if isinstance(o, Jet):
            return Jet(self.v + o.v, tuple(a + b for a, b in zip(self.d, o.d)))
        return Jet(self.v + o, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, tuple(-a for a in self.d))

    def __sub__(self, o):
        return self + (-o if isinstance(o, Jet) else -o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Jet):
            return Jet(self.v * o.v,
                       tuple(a * o.v + self.v * b for a, b in zip(self.d, o.d)))
        return Jet(self.v * o, tuple(a * o for a in self.d))

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Jet):
            w = o.v * o.v
            return Jet(self.v / o.v,
                       tuple((a * o.v - self.v * b) / w
                             for a, b in zip(self.d, o.d)))
        return Jet(self.v / o, tuple(a / o for a in self.d))

    def __rtruediv__(self, o):
        w = self.v * self.v
        return Jet(o / self.v, tuple(-o * a / w for a in self.d))

    def __pow__(self, n):
        out = Jet(to_mpc(1), (to_mpc(0),) * 3)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


def _theta_jet(t1, t2, t3, ctx):
    """Sixteen theta constants at (t1, t2, t3) as Jets in the tau variables.

    Same lattice sum as theta_all, with three extra weighted accumulators
    per characteristic; termwise d/dtau1 multiplies by i pi m1^2/4, etc."""
    om = siegel.PeriodMatrix(to_mpc(t1), to_mpc(t2), to_mpc(t3))
    bits = ctx.total_bits
    M = theta.truncation_radius(om, bits)
    ipi4 = mpc(0, gmpy2.const_pi() / 4)
    x1 = gmpy2.exp(ipi4 * om.tau1)
    x2 = gmpy2.exp(ipi4 * om.tau2)
    x3 = gmpy2.exp(2 * ipi4 * om.tau3)

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
    zero = to_mpc(0)
    # acc[i] = [S, S*m1^2, S*m2^2, S*m1*m2]
    acc = [[zero, zero, zero, zero] for _ in range(16)]
    for m1 in range(-M, M + 1):
        a0 = m1 & 1
        q1 = p1[abs(m1)]
        m1sq = m1 * m1
        for m2 in range(-M, M + 1):
            a1 = m2 & 1
            j = m1 * m2
            t = q1 * p2[abs(m2)] * (x3p[j] if j >= 0 else x3n[-j])
            base = 4 * a0 + 8 * a1
            w = (m1sq, m2 * m2, j)
            for b, r in ((0, t), (1, rot[m1 % 4] * t),
                         (2, rot[m2 % 4] * t), (3, rot[(m1 + m2) % 4] * t)):
                cell = acc[base + b]
                cell[0] += r
                cell[1] += w[0] * r
                cell[2] += w[1] * r
                cell[3] += w[2] * r
    out = []
    for i in range(16):
        if not theta.is_even(i):
            out.append(Jet(zero, (zero, zero, zero)))
            continue
        S, S1, S2, S3 = acc[i]
        out.append(Jet(S, (ipi4 * S1, ipi4 * S2, 2 * ipi4 * S3)))
    return out


def _forms_jet(th):
    h4 = sum(th[i] ** 8 for i in theta.EVEN)
    h10 = Jet(to_mpc(1), (to_mpc(0),) * 3)
    for i in theta.EVEN:
        h10 = h10 * th[i] ** 2
    h6 = Jet(to_mpc(0), (to_mpc(0),) * 3)
    for (i, j, k), s in invariants.h6_signed_triples():
        h6 = h6 + s * (th[i] * th[j] * th[k]) ** 4
    h12 = Jet(to_mpc(0), (to_mpc(0),) * 3)
    for six in invariants.h12_sextets():
        t = Jet(to_mpc(1), (to_mpc(0),) * 3)
        for i in six:
            t = t * th[i] ** 4
        h12 = h12 + t
    h16 = (h12 * h4 - 2 * h6 * h10) / 3
    return h4, h6, h10, h12, h16


def _f_jet(t1, t2, t3, kind, ctx):
    """Invariant triple and 3x3 Jacobian at (t1, t2, t3)."""
    if kind == invariants.KIND_BPRIME:
        th = _theta_jet(t1 / 2, t2 / 2, t3 / 2, ctx)
        half = mpfr(1) / 2
        th = [Jet(j.v, tuple(half * a for a in j.d)) for j in th]
        f = [th[k] / th[0] for k in (1, 2, 3)]
    else:
        th = _theta_jet(t1, t2, t3, ctx)
        h4, h6, h10, h12, h16 = _forms_jet(th)
        if kind == invariants.KIND_IGUSA:
            f = [h12 ** 5 / h10 ** 6, h4 * h12 ** 3 / h10 ** 4,
                 h16 * h12 ** 2 / h10 ** 4]
        elif kind == invariants.KIND_STRENG:
            f = [h4 * h6 / h10, h4 ** 2 * h12 / h10 ** 2, h4 ** 5 / h10 ** 2]
        else:
            raise ValueError(f"unknown kind {kind}")
    vals = [j.v for j in f]
    jac = [list(j.d) for j in f]
    return vals, jac


def _solve3(jac, rhs):
    """3x3 complex linear solve, partial pivoting."""
    a = [row[:] + [rhs[i]] for i, row in enumerate(jac)]
    for col in range(3):
        piv = max(range(col, 3), key=lambda r: abs(a[r][col]))
        if abs(a[piv][col]) == 0:
            raise ZeroDivisionError("singular Jacobian")
        a[col], a[piv] = a[piv], a[col]
        for r in range(col + 1, 3):
            m = a[r][col] / a[col][col]
            for c in range(col, 4):
                a[r][c] -= m * a[col][c]
    x = [to_mpc(0)] * 3
    for r in (2, 1, 0):
        s = a[r][3] - sum(a[r][c] * x[c] for c in range(r + 1, 3))
        x[r] = s / a[r][r]
    return x


def _rel_residual(vals, target):
    return max(abs(v - t) / max(mpfr(1), abs(t)) for v, t in zip(vals, target))


def _newton(tau, target, kind, ctx, tol, max_iter):
    """Newton iteration toward f(tau) = target.  Returns (ok, tau, residual)."""
    t1, t2, t3 = tau
    best = None
    for _ in range(max_iter):
        try:
            vals, jac = _f_jet(t1, t2, t3, kind, ctx)
        except (G2Error, ValueError, ZeroDivisionError):
            return False, (t1, t2, t3), best
        res = _rel_residual(vals, target)
        if best is None or res < best:
            best = res
        if res < tol:
            return True, (t1, t2, t3), res
        try:
            dx = _solve3(jac, [v - t for v, t in zip(vals, target)])
        except ZeroDivisionError:
            return False, (t1, t2, t3), best
        step = max(abs(d) for d in dx)
        if not gmpy2.is_finite(step) or step > 4:
            return False, (t1, t2, t3), best
        t1, t2, t3 = t1 - dx[0], t2 - dx[1], t3 - dx[2]
    return False, (t1, t2, t3), best


def _seed_pool(ctx, n=16):
    rng = random.Random(2026)
    return [siegel.random_fundamental_point(rng, ctx) for _ in range(n)]


def _check_target(target):
    for v in target.values():
        z = to_mpc(v)
        if not (gmpy2.is_finite(z.real) and gmpy2.is_finite(z.imag)):
            raise SingularTargetError("non-finite invariant target")
    if target.kind == invariants.KIND_BPRIME:
        try:
            invariants.b_from_bprime(*[to_mpc(v) for v in target.values()])
        except SingularError as e:
            raise SingularTargetError(str(e)) from e


def borchardt_fast_path(target, ctx):
    """Direct recovery for theta-quotient targets; None means REJECT."""
    if target.kind != invariants.KIND_BPRIME:
        raise ValueError("fast path applies to theta-quotient targets only")
    with ctx.workprec():
        tol = mpfr(2) ** (-ctx.n_bits + 48)
        tv = [to_mpc(v) for v in target.values()]
        try:
            b = invariants.b_from_bprime(*tv)
            om = borchardt.recover_tau(b, ctx)
            vals, _ = _f_jet(*om.triple(), invariants.KIND_BPRIME, ctx)
        except (G2Error, ValueError):
            return None
        res = _rel_residual(vals, tv)
        if res < tol:
            return InversionResult(om, res, 0, "borchardt_direct")
        return None


def invert_invariants(target, seed=None, ctx=None):
    """Period matrix with the given invariant triple.

    Tries the Borchardt fast path for theta-quotient targets, then Newton
    continuation from a deterministic seed pool (an explicit seed, if
    given, is tried first)."""
    from .precision import DEFAULT_CTX
    if ctx is None:
        ctx = DEFAULT_CTX
    _check_target(target)
    if target.kind == invariants.KIND_BPRIME:
        fast = borchardt_fast_path(target, ctx)
        if fast is not None:
            return fast
    lctx = ctx.low()
    with ctx.workprec():
        tv_full = [to_mpc(v) for v in target.values()]
    seeds = ([seed] if seed is not None else []) + _seed_pool(lctx)
    tol_full = mpfr(2) ** (-ctx.n_bits + 48)
    for s in seeds:
        ok, tau, steps = _track(s, tv_full, target.kind, lctx)
        if not ok:
            continue
        # full-precision polish against the exact target
        with ctx.workprec():
            tau = tuple(to_mpc(t) for t in tau)
            okp, tau, res = _newton(tau, tv_full, target.kind, ctx,
                                    tol_full, max_iter=16)
        if okp:
            om = siegel.PeriodMatrix(*tau)
            return InversionResult(om, res, steps, "newton_continuation")
        if res is not None and res < mpfr(2) ** (-lctx.n_bits + 24):
            # the path converged at tracking precision but Newton stalls
            # above the full-precision tolerance
            raise PrecisionLossError(
                f"polish stagnated at residual {res}")
    raise PathFailureError("continuation failed from all seeds")


def _track(seed, target_vals, kind, lctx):
    """Low-precision continuation along the segment v0 -> target."""
    with lctx.workprec():
        tv = [to_mpc(v) for v in target_vals]
        tau = tuple(to_mpc(t) for t in seed.triple())
        try:
            v0, _ = _f_jet(*tau, kind, lctx)
        except (G2Error, ValueError):
            return False, None, 0
        tol = mpfr(2) ** (-lctx.n_bits + 16)
        t = mpfr(0)
        dt = mpfr(1) / 2
        steps = 0
        while t < 1:
            tn = min(mpfr(1), t + dt)
            vt = [(1 - tn) * a + tn * b for a, b in zip(v0, tv)]
            ok, tau_new, _ = _newton(tau, vt, kind, lctx, tol, max_iter=12)
            if ok:
                tau = tau_new
                t = tn
                dt = min(2 * dt, mpfr(1) / 2)
                steps += 1
            else:
                dt = dt / 2
                if dt < mpfr(2) ** -10:
                    return False, None, steps
        return True, tau, steps
