"""Dense univariate polynomial arithmetic over mpc, the extended Euclidean
row used by Cauchy interpolation, and rational reconstruction.

A polynomial is a plain list of gmpy2.mpc coefficients, index = degree.
All routines run at the caller's active gmpy2 precision; a PrecisionContext
is only consulted for tolerances.
"""

from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .errors import IllConditionedError, NoConvergentError, PrecisionLossError
from .precision import to_mpc


def trim(p, tol=None):
    """Drop trailing coefficients below tol (relative to the largest one)."""
    if tol is None:
        q = list(p)
        while q and q[-1] == 0:
            q.pop()
        return q
    m = max((abs(c) for c in p), default=mpfr(0))
    cut = m * tol
    q = list(p)
    while q and abs(q[-1]) <= cut:
        q.pop()
    return q


def degree(p):
    return len(p) - 1


def padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
            for i in range(n)]


def psub(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0)
            for i in range(n)]


def pscale(p, c):
    return [c * a for a in p]


def pmul(p, q):
    if not p or not q:
        return []
    out = [to_mpc(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def peval(p, x):
    """Horner evaluation."""
    acc = to_mpc(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pdivmod(p, q):
    """Quotient and remainder of dense division by q (leading coeff != 0)."""
    q = list(q)
    while q and q[-1] == 0:
        q.pop()
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq = len(q) - 1
    lead = q[-1]
    out = [to_mpc(0)] * max(1, len(p) - dq)
    while len(r) - 1 >= dq and any(c != 0 for c in r):
        k = len(r) - 1 - dq
        c = r[-1] / lead
        out[k] = c
        for i in range(len(q)):
            r[k + i] -= c * q[i]
        r.pop()
    return out, r


def poly_product_tree(roots):
    """prod (X - r_i) assembled bottom-up by a subproduct tree."""
    if not roots:
        raise ValueError("empty root list")
    level = [[-to_mpc(r), to_mpc(1)] for r in roots]
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            nxt.append(pmul(level[i], level[i + 1]))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def synthetic_divide(p, r):
    """p / (X - r) for an exact root r; returns the degree-(n-1) quotient."""
    out = [to_mpc(0)] * (len(p) - 1)
    acc = to_mpc(0)
    for i in range(len(p) - 1, 0, -1):
        acc = acc * r + p[i]
        out[i - 1] = acc
    return out


def interp_poly_uni(nodes, values, min_gap=None):
    """Unique interpolant of degree < len(nodes), by Newton's divided
    differences.  Raises ILL_CONDITIONED on clustered nodes."""
    n = len(nodes)
    if n != len(values):
        raise ValueError("nodes/values length mismatch")
    xs = [to_mpc(x) for x in nodes]
    if min_gap is not None:
        for i in range(n):
            for j in range(i + 1, n):
                if abs(xs[i] - xs[j]) < min_gap:
                    raise IllConditionedError(
                        f"nodes {i} and {j} closer than {min_gap}")
    # divided-difference table, then expand the Newton form
    coef = [to_mpc(v) for v in values]
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - level])
    poly = [coef[-1]]
    for i in range(n - 2, -1, -1):
        poly = padd(pmul(poly, [-xs[i], to_mpc(1)]), [coef[i]])
    return poly


def ext_euclid_row(g, f, k, ctx=None):
    """First extended-Euclid row (r_j, t_j) on (g, f) with deg r_j < k.

    Maintains r = g*s + f*t; returns (r_j, t_j) so that r_j = t_j * f mod g.
    Leading coefficients that collapse relative to the row's largest one
    are noise left over from a degree jump in the remainder chain (the
    hallmark of a rational interpolation instance) and are stripped
    before the next division.
    """
    if degree(f) >= degree(g):
        raise ValueError("requires deg f < deg g")
    if k < 1:
        raise ValueError("k must be >= 1")
    tol = ctx.half_tol() if ctx is not None else mpfr(2) ** (-gmpy2.get_context().precision // 2)
    r0, r1 = [to_mpc(c) for c in g], [to_mpc(c) for c in f]
    t0, t1 = [to_mpc(0)], [to_mpc(1)]

    def strip(p):
        q = trim(p)
        m = max((abs(c) for c in p), default=mpfr(0))
        while q and abs(q[-1]) < tol * m:
            q = trim(q[:-1])
        return q

    while True:
        r1t = strip(r1)
        if not r1t or len(r1t) - 1 < k:
            r1 = r1t
            break
        q, r2 = pdivmod(r0, r1t)
        t2 = psub(t0, pmul(q, t1))
        r0, r1 = r1t, r2
        t0, t1 = t1, t2
    return trim(r1), trim(t1)


def rational_reconstruct(x, den_bound):
    """Nearest rational p/q with q <= den_bound, via continued fractions.

    The input must approximate p/q to error < 1/(2*den_bound^2); otherwise
    NO_CONVERGENT is raised so the caller can double the precision.
    """
    if den_bound < 1:
        raise ValueError("den_bound must be >= 1")
    num, den = mpfr(x).as_integer_ratio()
    num, den = int(num), int(den)
    target = Fraction(num, den)
    # convergents of the continued fraction of num/den
    p0, q0, p1, q1 = 1, 0, num // den if den else 0, 1
    a = num // den
    num, den = den, num - a * den
    best = Fraction(p1, q1)
    while den != 0 and q1 <= den_bound:
        best = Fraction(p1, q1)
        a = num // den
        num, den = den, num - a * den
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
    if den == 0 and q1 <= den_bound:
        best = Fraction(p1, q1)
    err = abs(target - best)
    if err >= Fraction(1, 2 * den_bound * den_bound):
        raise NoConvergentError(
            f"no convergent with q <= {den_bound} within 1/(2q_max^2)")
    return best


def reconstruct_real(z, den_bound, imag_tol):
    """Rational reconstruction of an mpc that is expected to be real."""
    if abs(z.imag) > imag_tol * max(mpfr(1), abs(z.real)):
        raise NoConvergentError("imaginary part too large for a real coefficient")
    return rational_reconstruct(z.real, den_bound)
