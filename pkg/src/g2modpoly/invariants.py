"""Siegel modular forms h4, h6, h10, h12, h16 and the three invariant
systems (Igusa j, Streng i, theta-quotient b'), with conversions.

The index sets behind h6 and h12 are derived, not transcribed:

  * h12 runs over the complements of the 15 four-element subsets of P
    whose characteristic vectors sum to zero mod 2 (Goepel quadruples);
  * h6 runs over the unique 60-triple orbit of the generator action that
    admits a consistent sign assignment (the other 60 triples provably
    do not).  The global sign is a convention: the lexicographically
    smallest triple in the support gets +1.

Both constructions are asserted at build time and validated numerically
by the modularity tests.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

from . import siegel, theta
from . import symplectic as sp
from .errors import ProductOfEllipticError, SingularError
from .precision import PrecisionContext, to_mpc

KIND_IGUSA = "igusa"
KIND_STRENG = "streng"
KIND_BPRIME = "bprime"


@dataclass(frozen=True)
class InvariantTriple:
    kind: str
    v1: object
    v2: object
    v3: object

    def values(self):
        return (self.v1, self.v2, self.v3)


@dataclass(frozen=True)
class SiegelFormValues:
    h4: object
    h6: object
    h10: object
    h12: object
    h16: object


def _char_vec(i):
    a, b = theta.char_of(i)
    return (a[0], a[1], b[0], b[1])


@lru_cache(maxsize=None)
def h12_sextets():
    """Complements of the Goepel quadruples; exactly 15 of them."""
    quads = [q for q in itertools.combinations(theta.EVEN, 4)
             if all(sum(_char_vec(i)[k] for i in q) % 2 == 0 for k in range(4))]
    assert len(quads) == 15
    return tuple(tuple(sorted(set(theta.EVEN) - set(q))) for q in quads)


@lru_cache(maxsize=None)
def _generator_etas():
    """zeta_gamma^4 for the four group generators, read off numerically."""
    ctx = PrecisionContext(n_bits=96, n_low_bits=64)
    gens = (sp.J, sp.translation(0, 0), sp.translation(0, 1), sp.translation(1, 1))
    etas = []
    with ctx.workprec():
        om = siegel.PeriodMatrix(to_mpc(0.11 + 1.17j), to_mpc(-0.23 + 1.71j),
                                 to_mpc(0.05 + 0.31j))
        th = theta.theta_all(om, ctx)
        z8 = theta.zeta8(ctx)
        for g in gens:
            act = theta.theta_action_of(g)
            t1, t2, t3 = sp.act(g, *om.triple())
            thg = theta.theta_all(siegel.PeriodMatrix(t1, t2, t3), ctx)
            det = sp.cd_det(g, *om.triple())
            R = thg[0] / (th[act.perm[0]] * z8 ** act.upow[0])
            val = (R ** 4 / det ** 2).real
            assert abs(abs(val) - 1) < 1e-10
            etas.append(1 if val > 0 else -1)
    return tuple(gens), tuple(etas)


@lru_cache(maxsize=None)
def h6_signed_triples():
    """The 60 signed triples of h6, by sign propagation along the
    generator action.  Returns a tuple of ((i, j, k), sign)."""
    gens, etas = _generator_etas()
    actions = [theta.theta_action_of(g) for g in gens]
    triples = list(itertools.combinations(theta.EVEN, 3))
    unassigned = set(triples)
    support = None
    while unassigned:
        seed = min(unassigned)
        stack = [(seed, 1)]
        orbit = {}
        ok = True
        while stack:
            T, s = stack.pop()
            if T in orbit:
                if orbit[T] != s:
                    ok = False
                continue
            orbit[T] = s
            for act, eta in zip(actions, etas):
                Timg = tuple(sorted(act.perm[i] for i in T))
                u = sum(act.upow[i] for i in T)
                stack.append((Timg, s * eta * (-1) ** (u % 2)))
        unassigned -= set(orbit)
        if ok:
            assert support is None, "sign system not unique"
            support = orbit
    assert support is not None and len(support) == 60
    return tuple(sorted(support.items()))


def siegel_forms(th):
    """h4, h6, h10, h12, h16 from the sixteen theta values (odd ones 0)."""
    h4 = sum((th[i] ** 2) ** 4 for i in theta.EVEN)
    h10 = to_mpc(1)
    for i in theta.EVEN:
        h10 *= th[i] ** 2
    h6 = to_mpc(0)
    for (i, j, k), s in h6_signed_triples():
        h6 += s * (th[i] * th[j] * th[k]) ** 4
    h12 = to_mpc(0)
    for six in h12_sextets():
        t = to_mpc(1)
        for i in six:
            t *= th[i] ** 4
        h12 += t
    h16 = (h12 * h4 - 2 * h6 * h10) / 3
    return SiegelFormValues(h4, h6, h10, h12, h16)


def igusa_from_forms(f, ctx):
    scale = max(abs(f.h4) ** 5, abs(f.h12) ** (mpfr(5) / 3), mpfr(2) ** -ctx.n_bits)
    if abs(f.h10) ** 2 < ctx.half_tol() * scale:
        raise ProductOfEllipticError("h10 vanishes: product of elliptic curves")
    return InvariantTriple(KIND_IGUSA,
                           f.h12 ** 5 / f.h10 ** 6,
                           f.h4 * f.h12 ** 3 / f.h10 ** 4,
                           f.h16 * f.h12 ** 2 / f.h10 ** 4)


def streng_from_forms(f, ctx):
    scale = max(abs(f.h4) ** 5, abs(f.h12) ** (mpfr(5) / 3), mpfr(2) ** -ctx.n_bits)
    if abs(f.h10) ** 2 < ctx.half_tol() * scale:
        raise ProductOfEllipticError("h10 vanishes: product of elliptic curves")
    return InvariantTriple(KIND_STRENG,
                           f.h4 * f.h6 / f.h10,
                           f.h4 ** 2 * f.h12 / f.h10 ** 2,
                           f.h4 ** 5 / f.h10 ** 2)


def streng_igusa_convert(t):
    """Birational conversion between the Streng and Igusa triples."""
    if t.kind == KIND_IGUSA:
        j1, j2, j3 = t.values()
        if abs(j1) == 0:
            raise SingularError("j1 = 0")
        return InvariantTriple(KIND_STRENG,
                               j2 * (j2 - 3 * j3) / (2 * j1),
                               j2 ** 2 / j1,
                               j2 ** 5 / j1 ** 3)
    if t.kind == KIND_STRENG:
        i1, i2, i3 = t.values()
        if abs(i3) == 0:
            raise SingularError("i3 = 0")
        return InvariantTriple(KIND_IGUSA,
                               i2 ** 5 / i3 ** 2,
                               i2 ** 3 / i3,
                               i2 ** 2 * (i2 - 2 * i1) / (3 * i3))
    raise ValueError(f"cannot convert kind {t.kind}")


def b_from_bprime(b1p, b2p, b3p):
    """Squared quotients b_i(Omega) from the b'_i(Omega) via duplication."""
    dup = theta.duplication(to_mpc(1), to_mpc(b1p), to_mpc(b2p), to_mpc(b3p))
    den = dup[0]
    if den == 0:
        raise SingularError("duplication denominator vanishes")
    return {i: dup[i] / den for i in theta.EVEN}


def bprime_from_b(b):
    """b'_i(Omega) from the ten squared quotients b_i(Omega)."""
    den = 1 + b[4] + b[8] + b[12]
    if abs(den) == 0:
        raise SingularError("1 + b4 + b8 + b12 vanishes")
    return ((b[1] + b[9]) / den, (b[2] + b[6]) / den, (b[3] + b[15]) / den)


def bprime_of(om, ctx):
    """The triple b'_i(Omega) = theta_i(Omega/2)/theta_0(Omega/2)."""
    half = siegel.PeriodMatrix(om.tau1 / 2, om.tau2 / 2, om.tau3 / 2)
    q, _ = theta.theta_quotients_anywhere(half, ctx)
    return InvariantTriple(KIND_BPRIME, q[1], q[2], q[3])


def bsq_of(om, ctx):
    """The ten squared quotients b_i(Omega) = theta_i^2/theta_0^2."""
    q, _ = theta.theta_quotients_anywhere(om, ctx)
    return {i: q[i] ** 2 for i in theta.EVEN}


def invariants_of(om, ctx, kind):
    """Invariant triple of a period matrix under the chosen system."""
    if kind == KIND_BPRIME:
        return bprime_of(om, ctx)
    with ctx.workprec():
        red = siegel.reduce_to_fundamental(om, ctx)
        th = theta.theta_all(red.omega_reduced, ctx)
        f = siegel_forms(th)
        if kind == KIND_IGUSA:
            return igusa_from_forms(f, ctx)
        if kind == KIND_STRENG:
            return streng_from_forms(f, ctx)
    raise ValueError(f"unknown kind {kind}")
