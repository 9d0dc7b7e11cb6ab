import random

import gmpy2
from gmpy2 import mpfr

from g2modpoly import borchardt, siegel, theta
from g2modpoly.precision import PrecisionContext, to_mpc

CTX = PrecisionContext(n_bits=200)


def test_fixed_points():
    with CTX.workprec():
        assert abs(borchardt.borchardt_mean(1, 1, 1, CTX) - 1) < mpfr(2) ** -190
        # common value a: mean of (1, a, a, a) is not a, but (a,a,a) from
        # start value u0=a is; emulate by scaling: B2 is homogeneous of deg 1
        m = borchardt.borchardt_mean(to_mpc(2.5), to_mpc(2.5), to_mpc(2.5), CTX)
        m2 = borchardt.borchardt_mean(1, 1, 1, CTX)
        assert abs(m) > 1  # lies between 1 and 2.5
        assert abs(m2 - 1) < mpfr(2) ** -190


def test_mean_is_inverse_theta0_squared():
    rng = random.Random(7)
    with CTX.workprec():
        for _ in range(5):
            om = siegel.random_fundamental_point(rng)
            th = theta.theta_all(om, CTX)
            b = [(th[i] / th[0]) ** 2 for i in (1, 2, 3)]
            m = borchardt.borchardt_mean(b[0], b[1], b[2], CTX)
            assert abs(m - 1 / th[0] ** 2) < mpfr(2) ** -180 * abs(m)


def test_quadratic_convergence():
    rng = random.Random(8)
    with CTX.workprec():
        om = siegel.random_fundamental_point(rng)
        th = theta.theta_all(om, CTX)
        b = [(th[i] / th[0]) ** 2 for i in (1, 2, 3)]
        _, iters = borchardt.borchardt_mean(b[0], b[1], b[2], CTX,
                                            return_iterations=True)
        # quadratic contraction: ~log2(n_bits) iterations, far below the
        # stall bound
        assert iters <= 20


def test_round_trip_tau():
    rng = random.Random(9)
    with CTX.workprec():
        tol = mpfr(2) ** -160
        for _ in range(20):
            om = siegel.random_fundamental_point(rng)
            th = theta.theta_all(om, CTX)
            b = {i: (th[i] / th[0]) ** 2 for i in theta.EVEN}
            rec = borchardt.recover_tau(b, CTX)
            assert max(abs(a - c) for a, c in
                       zip(rec.triple(), om.triple())) < tol
            assert siegel.is_in_fundamental(rec, tol=mpfr(2) ** -20)


def test_round_trip_diagonal():
    with CTX.workprec():
        om = siegel.PeriodMatrix(to_mpc(1.31j), to_mpc(1.73j), to_mpc(0j))
        th = theta.theta_all(om, CTX)
        b = {i: (th[i] / th[0]) ** 2 for i in theta.EVEN}
        rec = borchardt.recover_tau(b, CTX)
        assert abs(rec.tau3) < mpfr(2) ** -90
        assert abs(rec.tau1 - om.tau1) < mpfr(2) ** -160
        assert abs(rec.tau2 - om.tau2) < mpfr(2) ** -160


def test_round_trip_with_real_parts():
    with CTX.workprec():
        om = siegel.PeriodMatrix(to_mpc(0.3 + 1.4j), to_mpc(-0.3 + 1.9j),
                                 to_mpc(0.15 + 0.3j))
        assert siegel.is_in_fundamental(om)
        th = theta.theta_all(om, CTX)
        b = {i: (th[i] / th[0]) ** 2 for i in theta.EVEN}
        rec = borchardt.recover_tau(b, CTX)
        assert max(abs(a - c) for a, c in
                   zip(rec.triple(), om.triple())) < mpfr(2) ** -160
