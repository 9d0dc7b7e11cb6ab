import random

import pytest
from gmpy2 import mpfr

from g2modpoly import siegel
from g2modpoly import symplectic as sp
from g2modpoly.precision import PrecisionContext, to_mpc

CTX = PrecisionContext(n_bits=128)


def test_period_matrix_validation():
    with CTX.workprec():
        siegel.PeriodMatrix(to_mpc(1j), to_mpc(2j), to_mpc(0.1j))
        with pytest.raises(ValueError):
            siegel.PeriodMatrix(to_mpc(-1j), to_mpc(2j), to_mpc(0j))
        with pytest.raises(ValueError):
            siegel.PeriodMatrix(to_mpc(1j), to_mpc(1j), to_mpc(2j))


def test_minkowski_diagonal_sort():
    with CTX.workprec():
        y1, y2, y3, U = siegel.minkowski_reduce(mpfr(2), mpfr(1), mpfr(0))
        assert (y1, y2, y3) == (1, 2, 0)
        y1, y2, y3, U = siegel.minkowski_reduce(mpfr(1), mpfr(2), mpfr("0.25"))
        assert U == ((1, 0), (0, 1))


def test_minkowski_reduces_and_preserves_det():
    with CTX.workprec():
        a, b, c = mpfr(1), mpfr(1), mpfr("0.9")
        y1, y2, y3, U = siegel.minkowski_reduce(a, b, c)
        assert 0 <= 2 * y3 <= y1 <= y2
        assert abs((y1 * y2 - y3 * y3) - (a * b - c * c)) < 1e-30
        # Y' = U^t Y U
        t = [[U[0][0], U[1][0]], [U[0][1], U[1][1]]]
        Y = [[a, c], [c, b]]
        P = [[sum(t[i][k] * Y[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        Q = [[sum(P[i][k] * U[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        assert abs(Q[0][0] - y1) < 1e-30 and abs(Q[1][1] - y2) < 1e-30
        assert abs(Q[0][1] - y3) < 1e-30
        # minimality over small unimodular changes of basis
        import itertools
        for u in itertools.product(range(-3, 4), repeat=4):
            if u[0] * u[3] - u[1] * u[2] in (1, -1):
                v1 = u[0] * u[0] * a + 2 * u[0] * u[2] * c + u[2] * u[2] * b
                assert v1 > y1 - mpfr(2) ** -60


def test_reduce_translation_only():
    with CTX.workprec():
        om = siegel.PeriodMatrix(to_mpc(0.7 + 1.2j), to_mpc(0.7 + 1.9j), to_mpc(0.2j))
        r = siegel.reduce_to_fundamental(om, CTX)
        assert abs(r.omega_reduced.tau1.real) <= 0.5
        assert abs(r.omega_reduced.tau1.imag - 1.2) < 1e-25


def test_reduce_small_imaginary():
    with CTX.workprec():
        om = siegel.PeriodMatrix(to_mpc(0.1j), to_mpc(0.1j), to_mpc(0.02j))
        r = siegel.reduce_to_fundamental(om, CTX)
        assert siegel.is_in_fundamental(r.omega_reduced)
        assert r.omega_reduced.det_im() > om.det_im()


def test_reduce_idempotent_and_consistent():
    rng = random.Random(9)
    with CTX.workprec():
        for _ in range(20):
            om = siegel.PeriodMatrix(
                to_mpc(complex(rng.uniform(-2, 2), rng.uniform(0.05, 0.6))),
                to_mpc(complex(rng.uniform(-2, 2), rng.uniform(0.7, 2.0))),
                to_mpc(complex(rng.uniform(-1, 1), rng.uniform(0.0, 0.25))))
            r = siegel.reduce_to_fundamental(om, CTX)
            assert siegel.is_in_fundamental(r.omega_reduced)
            assert sp.is_symplectic(r.gamma)
            got = sp.act(r.gamma, om.tau1, om.tau2, om.tau3)
            want = r.omega_reduced.triple()
            assert all(abs(a - b) < mpfr(2) ** -64 for a, b in zip(got, want))
            r2 = siegel.reduce_to_fundamental(r.omega_reduced, CTX)
            assert all(abs(a - b) < mpfr(2) ** -64 for a, b in
                       zip(r2.omega_reduced.triple(), r.omega_reduced.triple()))


def test_random_fundamental_point():
    rng = random.Random(4)
    with CTX.workprec():
        for _ in range(5):
            om = siegel.random_fundamental_point(rng)
            assert siegel.is_in_fundamental(om)
            assert om.tau3.imag >= 0
