import random

import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from g2modpoly import siegel, theta
from g2modpoly import symplectic as sp
from g2modpoly.errors import SlowConvergenceError
from g2modpoly.precision import PrecisionContext, to_mpc

CTX = PrecisionContext(n_bits=200)


def g1theta(a, b, tau, terms=30):
    """Independent genus-1 theta constant oracle."""
    s = to_mpc(0)
    pi = gmpy2.const_pi()
    for n in range(-terms, terms + 1):
        m = n + a / mpfr(2)
        s += gmpy2.exp(mpc(0, pi) * (m * m * tau + m * b))
    return s


def test_char_indexing():
    for i in range(16):
        a, b = theta.char_of(i)
        assert theta.index_of(a, b) == i
    assert tuple(i for i in range(16) if theta.is_even(i)) == theta.EVEN


def test_odd_thetas_zero():
    rng = random.Random(0)
    with CTX.workprec():
        om = siegel.random_fundamental_point(rng)
        th = theta.theta_all(om, CTX)
        for i in range(16):
            if not theta.is_even(i):
                assert th[i] == 0


def test_duplication_matches_series():
    rng = random.Random(1)
    with CTX.workprec():
        tol = mpfr(2) ** -80
        for _ in range(10):
            om = siegel.random_fundamental_point(rng)
            th = theta.theta_all(om, CTX)
            om2 = siegel.PeriodMatrix(2 * om.tau1, 2 * om.tau2, 2 * om.tau3)
            th2 = theta.theta_all(om2, CTX)
            dup = theta.duplication(th[0], th[1], th[2], th[3])
            assert max(abs(dup[i] - th2[i] ** 2) for i in theta.EVEN) < tol


def test_diagonal_factorization_and_theta15():
    rng = random.Random(2)
    with CTX.workprec():
        tol = mpfr(2) ** -80
        for _ in range(5):
            ta = to_mpc(complex(0, 1 + rng.random()))
            tb = to_mpc(complex(0, 1.2 + rng.random()))
            om = siegel.PeriodMatrix(ta, tb, to_mpc(0j))
            th = theta.theta_all(om, CTX)
            assert abs(th[15]) < tol
            for i in theta.EVEN:
                a, b = theta.char_of(i)
                g = g1theta(a[0], b[0], ta) * g1theta(a[1], b[1], tb)
                assert abs(th[i] - g) < tol


def test_truncation_radius_tail():
    rng = random.Random(3)
    with CTX.workprec():
        om = siegel.random_fundamental_point(rng)
        th = theta.theta_all(om, CTX)
        big = PrecisionContext(n_bits=CTX.n_bits)
        # doubling the radius must not move the values
        M = theta.truncation_radius(om, CTX.total_bits)

        def theta0_with_radius(M):
            s = to_mpc(0)
            pi = gmpy2.const_pi()
            for m1 in range(-M, M + 1):
                for m2 in range(-M, M + 1):
                    if m1 % 2 or m2 % 2:
                        continue
                    q = (m1 * m1 * om.tau1 + m2 * m2 * om.tau2
                         + 2 * m1 * m2 * om.tau3) / 4
                    s += gmpy2.exp(mpc(0, pi) * q)
            return s

        a = theta0_with_radius(M)
        b = theta0_with_radius(2 * M)
        assert abs(a - b) < mpfr(2) ** -CTX.n_bits
        assert abs(a - th[0]) < mpfr(2) ** -CTX.n_bits


def test_slow_convergence_flagged():
    with CTX.workprec():
        om = siegel.PeriodMatrix(to_mpc(0.001j), to_mpc(0.001j), to_mpc(0j))
        with pytest.raises(SlowConvergenceError):
            theta.theta_all(om, CTX)


def test_transport_matches_direct_series():
    """Functional-equation correctness at quotient level for generator images."""
    rng = random.Random(4)
    gens = [sp.J, sp.translation(0, 0), sp.translation(0, 1), sp.translation(1, 1)]
    with CTX.workprec():
        tol = mpfr(2) ** -150
        for k in range(20):
            om = siegel.random_fundamental_point(rng)
            g = gens[k % 4]
            t1, t2, t3 = sp.act(g, *om.triple())
            omg = siegel.PeriodMatrix(t1, t2, t3)
            q_trans, _ = theta.theta_quotients_anywhere(omg, CTX)
            thg = theta.theta_all(omg, CTX)
            assert max(abs(q_trans[i] - thg[i] / thg[0]) for i in theta.EVEN) < tol


def test_action_homomorphism_on_quotients():
    rng = random.Random(5)
    gens = [sp.J, sp.translation(0, 0), sp.translation(0, 1), sp.translation(1, 1)]
    gens += [sp.sp_inverse(g) for g in gens]
    with CTX.workprec():
        tol = mpfr(2) ** -150
        for _ in range(8):
            g1 = sp.mat_mul(rng.choice(gens), rng.choice(gens))
            g2 = sp.mat_mul(rng.choice(gens), rng.choice(gens))
            om = siegel.random_fundamental_point(rng)
            th = theta.theta_all(om, CTX)
            z8 = theta.zeta8(CTX)

            def transported(action):
                den = th[action.perm[0]]
                return {i: th[action.perm[i]] / den * z8 ** action.quotient_power(i)
                        for i in theta.EVEN}

            a12 = theta.theta_action_of(sp.mat_mul(g1, g2))
            # compose: quotients at g1*g2*om from th at om, vs two-step transport
            t1, t2, t3 = sp.act(g2, *om.triple())
            om2 = siegel.PeriodMatrix(t1, t2, t3)
            th2 = theta.theta_all(om2, CTX)
            a1 = theta.theta_action_of(g1)
            den1 = th2[a1.perm[0]]
            step = {i: th2[a1.perm[i]] / den1 * z8 ** a1.quotient_power(i)
                    for i in theta.EVEN}
            direct = transported(a12)
            assert max(abs(step[i] - direct[i]) for i in theta.EVEN) < tol


def test_g24_acts_trivially_on_quotient_classes():
    """Elements of Gamma(2,4) permute nothing and contribute no phase to
    the quotients of the b-relevant classes {0,4,8,12} and {1,9},{2,6},{3,15}."""
    cat = sp.special_matrices()
    for name in ("gamma_prime_3", "gamma_prime_5", "gamma_prime_7"):
        action = theta.theta_action_of(cat[name])
        for group in ((0, 4, 8, 12), (1, 9), (2, 6), (3, 15)):
            assert sorted(action.perm[i] for i in group) == sorted(group)
