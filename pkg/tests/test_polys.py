import random
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from g2modpoly import polys
from g2modpoly.errors import NoConvergentError
from g2modpoly.precision import PrecisionContext, to_mpc


CTX = PrecisionContext(n_bits=200)


def close(a, b, tol):
    return abs(to_mpc(a) - to_mpc(b)) < tol


def test_euclid_row_textbook_fraction():
    # values of (X^2+1)/(X+1) recovered through the Euclid row
    with CTX.workprec():
        nodes = [1, 2, 3, 4]
        g = polys.poly_product_tree(nodes)
        vals = [(to_mpc(x) ** 2 + 1) / (to_mpc(x) + 1) for x in nodes]
        f = polys.interp_poly_uni(nodes, vals)
        r, t = polys.ext_euclid_row(g, f, 3, CTX)
        # normalize so t is monic; then r should be X^2+1, t should be X+1
        c = t[-1]
        r = [a / c for a in r]
        t = [a / c for a in t]
        tol = mpfr(2) ** -150
        assert len(r) == 3 and len(t) == 2
        assert close(r[0], 1, tol) and close(r[1], 0, tol) and close(r[2], 1, tol)
        assert close(t[0], 1, tol) and close(t[1], 1, tol)


def test_euclid_row_constant():
    with CTX.workprec():
        g = polys.poly_product_tree([0, 1, 2])
        f = [to_mpc(7)]
        r, t = polys.ext_euclid_row(g, f, 1, CTX)
        ratio = r[0] / t[0]
        assert close(ratio, 7, mpfr(2) ** -150)


def test_euclid_row_random_fraction_identity():
    rng = random.Random(7)
    with CTX.workprec():
        for _ in range(10):
            A = [to_mpc(rng.randint(-9, 9)) for _ in range(4)]
            A[-1] += int(A[-1] == 0)
            B = [to_mpc(rng.randint(-9, 9)) for _ in range(3)]
            B[-1] += int(B[-1] == 0)
            nodes = [to_mpc(x) for x in range(1, 7)]
            vals = [polys.peval(A, x) / polys.peval(B, x) for x in nodes]
            g = polys.poly_product_tree(nodes)
            f = polys.interp_poly_uni(nodes, vals)
            r, t = polys.ext_euclid_row(g, f, 4, CTX)
            # r*B - t*A should vanish identically
            d = polys.psub(polys.pmul(r, B), polys.pmul(t, A))
            m = max(max(abs(c) for c in r), max(abs(c) for c in t))
            assert all(abs(c) < mpfr(2) ** -120 * m for c in d)


def test_rational_reconstruct_basics():
    with CTX.workprec():
        assert polys.rational_reconstruct(mpfr(1) / 3, 10 ** 6) == Fraction(1, 3)
        assert polys.rational_reconstruct(mpfr("1.5"), 10 ** 6) == Fraction(3, 2)
        assert polys.rational_reconstruct(mpfr(24883200), 10 ** 6) == Fraction(24883200)


def test_rational_reconstruct_roundtrip_property():
    rng = random.Random(3)
    with PrecisionContext(n_bits=120).workprec():
        for _ in range(50):
            p = rng.randint(-10 ** 6, 10 ** 6)
            q = rng.randint(1, 10 ** 6)
            x = mpfr(p) / q
            assert polys.rational_reconstruct(x, 10 ** 6) == Fraction(p, q)


def test_rational_reconstruct_rejects_bad_input():
    # pi has no approximation with q <= 100 better than 1/(2*100^2)
    with CTX.workprec():
        x = gmpy2.const_pi()
    with pytest.raises(NoConvergentError):
        polys.rational_reconstruct(x, 100)


def test_product_tree_matches_naive_fold():
    rng = random.Random(11)
    with CTX.workprec():
        roots = [to_mpc(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)))
                 for _ in range(40)]
        tree = polys.poly_product_tree(roots)
        naive = [to_mpc(1)]
        for r in roots:
            naive = polys.pmul(naive, [-r, to_mpc(1)])
        m = max(abs(c) for c in naive)
        assert len(tree) == 41
        assert all(abs(a - b) < mpfr(2) ** -150 * m for a, b in zip(tree, naive))


def test_product_tree_small():
    with CTX.workprec():
        assert polys.poly_product_tree([0]) == [to_mpc(0), to_mpc(1)]
        p = polys.poly_product_tree([1, -1])
        assert close(p[0], -1, 1e-30) and close(p[1], 0, 1e-30) and close(p[2], 1, 1e-30)


def test_interp_poly_uni():
    with CTX.workprec():
        p = polys.interp_poly_uni([0, 1, 2], [0, 1, 4])
        assert close(p[2], 1, 1e-40) and close(p[1], 0, 1e-40) and close(p[0], 0, 1e-40)
        rng = random.Random(5)
        q = [to_mpc(rng.randint(-50, 50)) for _ in range(8)]
        nodes = [to_mpc(complex(x, 0.3)) for x in range(8)]
        got = polys.interp_poly_uni(nodes, [polys.peval(q, x) for x in nodes])
        assert all(abs(a - b) < mpfr(2) ** -140 for a, b in zip(got, q))


def test_synthetic_divide():
    with CTX.workprec():
        p = polys.poly_product_tree([1, 2, 3])
        q = polys.synthetic_divide(p, to_mpc(2))
        expect = polys.poly_product_tree([1, 3])
        assert all(abs(a - b) < mpfr(2) ** -150 for a, b in zip(q, expect))
