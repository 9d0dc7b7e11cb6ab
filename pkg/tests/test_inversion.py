import random

import gmpy2
import pytest
from gmpy2 import mpfr

from g2modpoly import invariants, inversion, siegel
from g2modpoly import symplectic as sp
from g2modpoly.errors import SingularTargetError
from g2modpoly.precision import PrecisionContext, to_mpc

CTX = PrecisionContext(n_bits=192, n_low_bits=96)


def test_jacobian_matches_finite_differences():
    rng = random.Random(42)
    with CTX.workprec():
        om = siegel.random_fundamental_point(rng)
        h = mpfr(10) ** -8
        for kind in (invariants.KIND_BPRIME, invariants.KIND_IGUSA,
                     invariants.KIND_STRENG):
            _, jac = inversion._f_jet(*om.triple(), kind, CTX)
            for k in range(3):
                d = [to_mpc(0)] * 3
                d[k] = to_mpc(h)
                vp, _ = inversion._f_jet(om.tau1 + d[0], om.tau2 + d[1],
                                         om.tau3 + d[2], kind, CTX)
                vm, _ = inversion._f_jet(om.tau1 - d[0], om.tau2 - d[1],
                                         om.tau3 - d[2], kind, CTX)
                for i in range(3):
                    fd = (vp[i] - vm[i]) / (2 * h)
                    assert abs(jac[i][k] - fd) < 1e-6 * max(1, abs(fd))


def test_fast_path_round_trip():
    rng = random.Random(43)
    with CTX.workprec():
        for _ in range(3):
            om = siegel.random_fundamental_point(rng)
            bp = invariants.bprime_of(om, CTX)
            r = inversion.borchardt_fast_path(bp, CTX)
            assert r is not None
            assert r.method == "borchardt_direct"
            assert r.residual < mpfr(2) ** (-CTX.n_bits + 48)
            assert max(abs(a - b) for a, b in
                       zip(r.omega.triple(), om.triple())) < mpfr(2) ** -150


def test_fast_path_reject_and_newton_fallback():
    rng = random.Random(5)
    g = sp.special_matrices()["gamma_134"]
    assert not sp.membership(g, "g24", 0)
    with CTX.workprec():
        om = siegel.random_fundamental_point(rng)
        t1, t2, t3 = sp.act(g, *om.triple())
        bp = invariants.bprime_of(siegel.PeriodMatrix(t1, t2, t3), CTX)
        assert inversion.borchardt_fast_path(bp, CTX) is None
        r = inversion.invert_invariants(bp, ctx=CTX)
        assert r.method == "newton_continuation"
        assert r.residual < mpfr(2) ** (-CTX.n_bits + 48)
        bp2 = invariants.bprime_of(r.omega, CTX)
        assert max(abs(a - b) for a, b in
                   zip(bp.values(), bp2.values())) < mpfr(2) ** -140


def test_igusa_round_trip_and_determinism():
    rng = random.Random(6)
    with CTX.workprec():
        om = siegel.random_fundamental_point(rng)
        j = invariants.invariants_of(om, CTX, invariants.KIND_IGUSA)
        r1 = inversion.invert_invariants(j, ctx=CTX)
        assert r1.method == "newton_continuation"
        j2 = invariants.invariants_of(r1.omega, CTX, invariants.KIND_IGUSA)
        assert max(abs(a - b) / max(1, abs(a)) for a, b in
                   zip(j.values(), j2.values())) < mpfr(2) ** -130
        # same target, same precision, no explicit seed: identical output
        r2 = inversion.invert_invariants(j, ctx=CTX)
        assert r1.omega.triple() == r2.omega.triple()


def test_degenerate_quadruple_rejected():
    with CTX.workprec():
        bp = invariants.InvariantTriple(invariants.KIND_BPRIME,
                                        to_mpc(1), to_mpc(1), to_mpc(1))
        assert inversion.borchardt_fast_path(bp, CTX) is None


def test_singular_target():
    bad = invariants.InvariantTriple(invariants.KIND_IGUSA,
                                     float("inf"), 1.0, 1.0)
    with pytest.raises(SingularTargetError):
        inversion.invert_invariants(bad, ctx=CTX)
