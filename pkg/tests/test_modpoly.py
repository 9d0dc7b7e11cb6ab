import random
from fractions import Fraction

import pytest
from gmpy2 import mpfr
from sympy import isprime

from g2modpoly import interp, invariants, modpoly, polys, siegel
from g2modpoly.precision import PrecisionContext

CTX = PrecisionContext(n_bits=192, n_low_bits=96)


@pytest.fixture(scope="module")
def bprime_cosets():
    return modpoly.coset_table(3, "bprime")


def test_humbert_oracle_values():
    for p, a, comp, h in ((2, 70, 6, 60), (3, 250, 24, 120),
                          (5, 1210, 120, 600)):
        o = modpoly.humbert_degree(p)
        assert (o.a_value, o.component_degree, o.h_degree) == (a, comp, h)


def test_humbert_sigma_identity():
    # sum_{x > 0} sigma1((p^2 - x^2)/4) = (5p^3 - 6p^2 - 5p + 6)/24
    for p in range(3, 100, 2):
        if not isprime(p):
            continue
        s = sum(modpoly.sigma1((p * p - x * x) // 4)
                for x in range(1, p) if (p * p - x * x) % 4 == 0)
        assert 24 * s == 5 * p ** 3 - 6 * p ** 2 - 5 * p + 6


def test_humbert_consistency():
    # v(p^2) * deg H + 5 = a/2 with v = 1/2 only for p = 2
    for p in (2, 3, 5, 7):
        o = modpoly.humbert_degree(p)
        lhs = o.h_degree / 2 + 5 if p == 2 else o.h_degree + 5
        assert lhs == o.a_value / 2
        assert o.component_degree == o.a_value // 10 - 1


def test_evaluate_at_structure(bprime_cosets):
    rng = random.Random(41)
    with CTX.workprec():
        om = siegel.random_fundamental_point(rng, CTX)
        ev = modpoly.evaluate_at(om, 3, "bprime", bprime_cosets, CTX)
        q = 40
        assert len(ev.phi1) == q + 1 and len(ev.psi2) == q
        assert abs(ev.phi1[q] - 1) < 1e-50

        # gamma = identity is a coset representative, so f1(3 Omega) is a root
        omp = siegel.PeriodMatrix(3 * om.tau1, 3 * om.tau2, 3 * om.tau3)
        g1, g2, g3 = invariants.invariants_of(omp, CTX, "bprime").values()
        scale = max(max(abs(c) for c in ev.phi1), abs(g1) ** q)
        assert abs(polys.peval(ev.phi1, g1)) / scale < mpfr(2) ** -140

        # Psi_l(root) / Phi1'(root) recovers the other two invariants
        dphi = [(l + 1) * ev.phi1[l + 1] for l in range(q)]
        dv = polys.peval(dphi, g1)
        assert abs(polys.peval(ev.psi2, g1) / dv - g2) < mpfr(2) ** -120
        assert abs(polys.peval(ev.psi3, g1) / dv - g3) < mpfr(2) ** -120


def test_save_load_roundtrip(tmp_path):
    D = interp.TriPoly({(0, 0, 0): Fraction(1), (2, 2, 2): Fraction(7)})
    tab = lambda c: {0: interp.TriPoly({(1, 0, 0): Fraction(c)}),
                     1: interp.TriPoly({(0, 1, 1): Fraction(-c)})}
    mset = modpoly.ModularPolynomialSet(3, "bprime", tab(4), tab(5), tab(6), D)
    modpoly.save_set(mset, str(tmp_path))
    back = modpoly.load_set(str(tmp_path))
    assert back.p == 3 and back.kind == "bprime"
    assert back.denominator.monomials == D.monomials
    for a, b in ((back.phi1_num, mset.phi1_num),
                 (back.psi2_num, mset.psi2_num),
                 (back.psi3_num, mset.psi3_num)):
        assert {l: P.monomials for l, P in a.items()} == \
               {l: P.monomials for l, P in b.items()}


def test_save_rejects_non_integer(tmp_path):
    D = interp.TriPoly({(0, 0, 0): Fraction(1, 3)})
    mset = modpoly.ModularPolynomialSet(3, "bprime", {}, {}, {}, D)
    with pytest.raises(AssertionError):
        modpoly.save_set(mset, str(tmp_path))


def test_load_bad_header(tmp_path):
    for poly in ("phi1", "psi2", "psi3", "den"):
        (tmp_path / f"{poly}.mpoly").write_text("WRONG\n")
    with pytest.raises(ValueError):
        modpoly.load_set(str(tmp_path))


def test_node_evaluator_checkpoint(tmp_path, bprime_cosets):
    ck = str(tmp_path / "nodes.ckpt")
    with CTX.workprec():
        ev = modpoly.NodeEvaluator(3, "bprime", bprime_cosets, CTX,
                                   checkpoint=ck)
        v1 = ev.vectors(0.65, 0.85, 0.6)
        assert ev.misses == 1
        ev.vectors(0.65, 0.85, 0.6)
        assert ev.misses == 1 and ev.calls == 2
        ev.close()
        ev2 = modpoly.NodeEvaluator(3, "bprime", bprime_cosets, CTX,
                                    checkpoint=ck)
        v2 = ev2.vectors(0.65, 0.85, 0.6)
        assert ev2.misses == 0
        assert all(a == b for a, b in zip(v1[0], v2[0]))
        ev2.close()
