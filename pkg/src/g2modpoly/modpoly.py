"""End-to-end modular polynomial pipeline: evaluation at points,
denominator-first interpolation builds, exact reconstruction, file I/O
and theorem-level verification.

For a prime p and an invariant system f = (f1, f2, f3), the three
modular polynomials at a point Omega are

    Phi1(X)   = prod_{gamma in C_p} (X - f1(p gamma Omega))
    Psi_l(X)  = sum_{gamma} f_l(p gamma Omega)
                * prod_{gamma' != gamma} (X - f1(p gamma' Omega))

with C_p the coset representatives of the kind's group modulo its
Gamma_0(p) intersection.  The coefficients of these polynomials are
rational functions of (f1, f2, f3)(Omega) with a common denominator;
the build recovers them by black-box interpolation over invariant-space
nodes, inverting each node back to a period matrix first.
"""

import base64
import hashlib
import json
import logging
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr
from sympy import divisor_sigma

from . import interp, invariants, inversion, polys, siegel
from . import symplectic as sp
from .errors import (NearDenominatorError, NoConvergentError,
                     PrecisionLossError)
from .precision import PrecisionContext, to_mpc

log = logging.getLogger(__name__)

KINDS = (invariants.KIND_IGUSA, invariants.KIND_STRENG,
         invariants.KIND_BPRIME)


@dataclass
class EvaluatedModPoly:
    p: int
    kind: str
    phi1: list           # length q + 1, monic
    psi2: list           # length q
    psi3: list
    omega: object


@dataclass
class ModularPolynomialSet:
    p: int
    kind: str
    phi1_num: dict       # coefficient index l -> TriPoly with Fraction coeffs
    psi2_num: dict
    psi3_num: dict
    denominator: object  # TriPoly with Fraction coefficients
    alpha: dict = field(default_factory=dict)   # Streng kind only
    c: dict = field(default_factory=dict)


@dataclass(frozen=True)
class HumbertDegreeOracle:
    p: int
    a_value: int
    component_degree: int
    h_degree: int


def sigma1(n):
    return int(divisor_sigma(n, 1))


def humbert_degree(p):
    """Degree data of the Humbert surface of discriminant p^2."""
    s = sum(sigma1((p * p - x * x) // 4)
            for x in range(-p + 1, p) if (p * p - x * x) % 4 == 0)
    a = 24 * s + 12 * p * p - 2
    h = a - 10 if p == 2 else a // 2 - 5       # v = 1/2 for p = 2, else 1
    comp = a // 10 - 1
    return HumbertDegreeOracle(p, a, comp, h)


def coset_table(p, kind):
    if kind == invariants.KIND_BPRIME:
        return sp.enumerate_cosets("g24", "g24&gamma0", p)
    return sp.enumerate_cosets("sp4", "gamma0", p)


def evaluate_at(om, p, kind, cosets, ctx, max_mag=None):
    """Phi1, Psi2, Psi3 at om, as complex coefficient vectors."""
    if max_mag is None:
        max_mag = mpfr(2) ** (ctx.n_bits // 16)
    with ctx.workprec():
        f1s, f2s, f3s = [], [], []
        for gamma in cosets.representatives:
            t1, t2, t3 = sp.act(gamma, *om.triple())
            omg = siegel.PeriodMatrix(p * t1, p * t2, p * t3)
            tr = invariants.invariants_of(omg, ctx, kind)
            v1, v2, v3 = tr.values()
            if max(abs(v1), abs(v2), abs(v3)) > max_mag:
                raise NearDenominatorError(
                    f"|f(p gamma Omega)| = {float(max(abs(v1), abs(v2), abs(v3))):.3g} "
                    "exceeds the dynamic range (near the denominator locus)")
            f1s.append(v1)
            f2s.append(v2)
            f3s.append(v3)
        phi1 = polys.poly_product_tree(f1s)
        q = len(f1s)
        psi2 = [to_mpc(0)] * q
        psi3 = [to_mpc(0)] * q
        for i in range(q):
            quot = polys.synthetic_divide(phi1, f1s[i])
            psi2 = polys.padd(psi2, polys.pscale(quot, f2s[i]))
            psi3 = polys.padd(psi3, polys.pscale(quot, f3s[i]))
        psi2 += [to_mpc(0)] * (q - len(psi2))
        psi3 += [to_mpc(0)] * (q - len(psi3))
        return EvaluatedModPoly(p, kind, phi1, psi2, psi3, om)


class NodeEvaluator:
    """Caching, checkpointed black box: invariant triple -> coefficient
    vectors of the evaluated modular polynomials.

    Each call inverts the node to a period matrix and evaluates the
    coset products.  Results persist to a checkpoint file so interrupted
    builds resume without recomputation."""

    def __init__(self, p, kind, cosets, ctx, checkpoint=None):
        self.p = p
        self.kind = kind
        self.cosets = cosets
        self.ctx = ctx
        self.q = len(cosets)
        self.checkpoint = checkpoint
        self.cache = {}
        self.calls = 0
        self.misses = 0
        self._fh = None
        if checkpoint:
            self._load()
            self._fh = open(checkpoint, "a")

    def _key(self, x, y, z):
        h = hashlib.sha256()
        h.update(f"{self.p}|{self.kind}|{self.ctx.n_bits}".encode())
        for v in (x, y, z):
            h.update(gmpy2.to_binary(to_mpc(v)))
        return h.hexdigest()

    def _load(self):
        if not os.path.exists(self.checkpoint):
            return
        with open(self.checkpoint) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                vecs = [[gmpy2.from_binary(base64.b64decode(c)) for c in v]
                        for v in rec["v"]]
                self.cache[rec["k"]] = vecs
        log.info("checkpoint: %d node evaluations loaded", len(self.cache))

    def _store(self, key, vecs):
        self.cache[key] = vecs
        if self._fh:
            rec = {"k": key,
                   "v": [[base64.b64encode(gmpy2.to_binary(c)).decode()
                          for c in v] for v in vecs]}
            self._fh.write(json.dumps(rec) + "\n")
            self._fh.flush()

    def vectors(self, x, y, z):
        """(phi1, psi2, psi3) coefficient vectors at the invariant node."""
        self.calls += 1
        key = self._key(x, y, z)
        if key in self.cache:
            return self.cache[key]
        self.misses += 1
        target = invariants.InvariantTriple(self.kind, to_mpc(x), to_mpc(y),
                                            to_mpc(z))
        res = inversion.invert_invariants(target, ctx=self.ctx)
        ev = evaluate_at(res.omega, self.p, self.kind, self.cosets, self.ctx)
        vecs = [ev.phi1, ev.psi2, ev.psi3]
        self._store(key, vecs)
        return vecs

    def coefficient(self, poly, l):
        """Scalar black box for a single coefficient."""
        def f(x, y, z):
            vec = self.vectors(x, y, z)[{"phi1": 0, "psi2": 1, "psi3": 2}[poly]]
            return vec[l]
        return f

    def close(self):
        if self._fh:
            self._fh.close()
            self._fh = None


# --- build -----------------------------------------------------------------

@dataclass
class BuildOptions:
    seed: int = 2026
    x_center: float = 0.65
    x_radius: float = 0.3
    y_center: float = 0.85
    y_radius: float = 0.15
    z_center: float = 0.6
    z_radius: float = 0.15
    grid_ny: int = 21
    grid_nz: int = 20
    cap_total: int = 28
    cap_var: int = 16
    discover_bits: int = 512
    max_doublings: int = 4
    checkpoint_dir: str = None


def _sub_centers(opts):
    """Disk centers for the scaled-substitution stage, where the second
    and third coordinates are y/x and z/x."""
    return opts.y_center / opts.x_center, opts.z_center / opts.x_center


def _reconstruct_tripoly(P, den_bound, imag_tol):
    out = {}
    for m, c in P.monomials.items():
        out[m] = polys.reconstruct_real(c, den_bound, imag_tol)
    return interp.TriPoly({m: v for m, v in out.items() if v != 0})


def _round_integer_tripoly(Q, poly, l, slack=0.25):
    """Round a raw-coordinate interpolant with integer coefficients.

    Anything farther than `slack` from the integer lattice means the
    interpolant is not the expected polynomial (aliasing or precision
    loss), so the caller's retry loop takes over."""
    out = {}
    for m, c in Q.monomials.items():
        r = gmpy2.rint(c.real)
        if abs(c.real - r) > slack or abs(c.imag) > slack:
            raise PrecisionLossError(
                f"{poly}[{l}] coefficient at {m} is not near an integer")
        if r != 0:
            out[m] = int(r)
    return interp.TriPoly(out)


def _exact_eval(P, x, y, z):
    s = to_mpc(0)
    for (i, j, k), c in P.monomials.items():
        s += to_mpc(Fraction(c)) * x ** i * y ** j * z ** k
    return s


def build(p, kind, ctx, opts=None):
    """Denominator-first build of the full modular polynomial set."""
    if opts is None:
        opts = BuildOptions()
    if kind == invariants.KIND_BPRIME and p == 2:
        raise ValueError("the theta-quotient polynomials do not exist for p = 2")
    cosets = coset_table(p, kind)
    q = len(cosets)
    log.info("build p=%d kind=%s: %d cosets, %d bits", p, kind, q, ctx.n_bits)
    last_err = None
    for doubling in range(opts.max_doublings + 1):
        try:
            return _build_once(p, kind, ctx, opts, cosets, q)
        except (PrecisionLossError, NoConvergentError) as e:
            last_err = e
            log.warning("build failed at %d bits (%s); doubling precision",
                        ctx.n_bits, e)
            ctx = ctx.doubled()
    raise PrecisionLossError(
        f"build failed after {opts.max_doublings} precision doublings: "
        f"{last_err}")


def _build_once(p, kind, ctx, opts, cosets, q):
    rng = random.Random(opts.seed)
    ck = opts.checkpoint_dir
    mk = (lambda name: os.path.join(ck, name)) if ck else (lambda name: None)
    if ck:
        os.makedirs(ck, exist_ok=True)

    # stage 1: degree profile of the probe coefficient (highest X-degree
    # non-trivial coefficient of Phi1) at reduced precision
    dctx = PrecisionContext(n_bits=max(opts.discover_bits, 128),
                           n_low_bits=96)
    with dctx.workprec():
        dev = NodeEvaluator(p, kind, cosets, dctx,
                            checkpoint=mk("discover.ckpt"))
        probe_lo = dev.coefficient("phi1", q - 1)
        t0 = time.time()
        sy, sz = _sub_centers(opts)
        profile = interp.discover_degrees(
            probe_lo, dctx, rng,
            cap_total=opts.cap_total, cap_var=opts.cap_var,
            x_center=opts.x_center, x_radius=opts.x_radius,
            y_center=opts.y_center, y_radius=opts.y_radius,
            z_center=opts.z_center, z_radius=opts.z_radius)
        dev.close()
    log.info("degree profile (probe coeff): %s (%.0fs)", profile,
             time.time() - t0)

    with ctx.workprec():
        ev = NodeEvaluator(p, kind, cosets, ctx, checkpoint=mk("grid.ckpt"))
        probe = ev.coefficient("phi1", q - 1)

        # stage 2: common denominator through the probe coefficient
        t0 = time.time()
        F = interp.interp_rat_tri(
            probe, profile, ctx, rng,
            x_center=opts.x_center, x_radius=opts.x_radius,
            y_center=sy, z_center=sz)
        log.info("probe coefficient interpolated (%.0fs, %d evals)",
                 time.time() - t0, ev.misses)
        D = _reconstruct_tripoly(F.den, 10 ** 6, ctx.half_tol())
        log.info("denominator: %d monomials, total degree %d",
                 len(D.monomials), D.total_degree())

        # stage 3: tensor grid of every coefficient times the denominator
        nx = q + 1
        xs = interp.circle_nodes(nx, center=opts.x_center,
                                 radius=opts.x_radius)
        ys = interp.circle_nodes(opts.grid_ny, center=opts.y_center,
                                 radius=opts.y_radius, phase=0.11)
        zs = interp.circle_nodes(opts.grid_nz, center=opts.z_center,
                                 radius=opts.z_radius, phase=0.23)
        dvals = [[[_exact_eval(D, x, y, z) for z in zs] for y in ys]
                 for x in xs]
        t0 = time.time()
        total = nx * opts.grid_ny * opts.grid_nz
        grid = []
        done = 0
        last_log = time.time()
        for ix, x in enumerate(xs):
            plane = []
            for iy, y in enumerate(ys):
                row = []
                for iz, z in enumerate(zs):
                    row.append(ev.vectors(x, y, z))
                    done += 1
                    if time.time() - last_log > 60:
                        log.info("grid: %d/%d nodes (%.0fs)", done, total,
                                 time.time() - t0)
                        last_log = time.time()
                plane.append(row)
            grid.append(plane)
        log.info("grid complete: %d nodes (%.0fs)", total, time.time() - t0)

        # stage 4: interpolate and reconstruct each numerator.  The fits
        # run in unit-circle coordinates: interpolating on the raw circles
        # amplifies value noise by radius^-degree, which buries the true
        # degree bounds under junk monomials.
        uxs = [(to_mpc(x) - opts.x_center) / to_mpc(opts.x_radius)
               for x in xs]
        uys = [(to_mpc(y) - opts.y_center) / to_mpc(opts.y_radius)
               for y in ys]
        uzs = [(to_mpc(z) - opts.z_center) / to_mpc(opts.z_radius)
               for z in zs]
        sets = {"phi1": {}, "psi2": {}, "psi3": {}}
        held_nodes = [
            (to_mpc(complex(opts.x_center) + 0.7 * opts.x_radius *
                    _unit(rng)),
             to_mpc(complex(opts.y_center) + 0.7 * opts.y_radius *
                    _unit(rng)),
             to_mpc(complex(opts.z_center) + 0.7 * opts.z_radius *
                    _unit(rng)))
            for _ in range(3)]
        held_vecs = [ev.vectors(*n) for n in held_nodes]
        gate_tol = mpfr(2) ** (-ctx.n_bits // 4)
        for pi, poly in enumerate(("phi1", "psi2", "psi3")):
            count = q if poly == "phi1" else q
            for l in range(count):
                vals = [[[grid[ix][iy][iz][pi][l] * dvals[ix][iy][iz]
                          for iz in range(opts.grid_nz)]
                         for iy in range(opts.grid_ny)]
                        for ix in range(nx)]
                P = interp.interp_poly_multi(vals, uxs, uys, uzs, ctx)
                Q = interp.denormalize_tripoly(
                    P, (opts.x_center, opts.y_center, opts.z_center),
                    (opts.x_radius, opts.y_radius, opts.z_radius))
                # the c0 = 1 denominator normalization makes every raw
                # numerator coefficient an integer, so magnitude pruning
                # happens here: noise monomials denormalize to well below
                # 0.5 while true monomials round exactly.  Pruning in the
                # normalized basis instead would discard real high-degree
                # monomials whose coefficients are squeezed by
                # radius^degree.
                N = _round_integer_tripoly(Q, poly, l)
                dx, dy, dz = N.degrees()
                if dy >= opts.grid_ny - 1 or dz >= opts.grid_nz - 1:
                    raise PrecisionLossError(
                        f"{poly}[{l}] saturates the grid degree bounds "
                        f"({dy}, {dz}); enlarge grid_ny/grid_nz")
                for node, vec in zip(held_nodes, held_vecs):
                    exact = _exact_eval(N, *node) / _exact_eval(D, *node)
                    if abs(exact - vec[pi][l]) > gate_tol * max(
                            1, abs(vec[pi][l])):
                        raise PrecisionLossError(
                            f"held-out gate failed for {poly}[{l}]")
                sets[poly][l] = N
            log.info("%s: %d coefficients reconstructed", poly, count)
        ev.close()
    return ModularPolynomialSet(p, kind, sets["phi1"], sets["psi2"],
                                sets["psi3"], D)


def _unit(rng):
    import cmath
    import math
    return cmath.exp(2j * math.pi * rng.random())


# --- verification ----------------------------------------------------------

@dataclass
class VerifyReport:
    checks: dict = field(default_factory=dict)

    def add(self, name, ok, data=""):
        self.checks[name] = (bool(ok), data)

    @property
    def all_pass(self):
        return all(ok for ok, _ in self.checks.values())

    def lines(self):
        out = []
        for name, (ok, data) in self.checks.items():
            status = "PASS" if ok else "FAIL"
            out.append(f"{status} {name}" + (f": {data}" if data else ""))
        return out


def _swap_yz(P):
    return interp.TriPoly({(i, k, j): c for (i, j, k), c in P.monomials.items()})


def _tripoly_eq(A, B):
    return A.monomials == B.monomials


def invariant_triple_values(om, kind, ctx):
    return invariants.invariants_of(om, ctx, kind).values()


def verify(mset, trials, ctx, rng=None):
    """Theorem-level verification report for a built set."""
    if rng is None:
        rng = random.Random(99)
    p, kind = mset.p, mset.kind
    rep = VerifyReport()
    q = p ** 3 + p ** 2 + p + 1

    # (d) denominator structure
    D = mset.denominator
    rep.add("den_total_degree", D.total_degree() == p ** 3 - p,
            f"{D.total_degree()} vs {p ** 3 - p}")
    sym = all(_tripoly_eq(D, interp.TriPoly(
        {perm(m): c for m, c in D.monomials.items()}))
        for perm in (lambda m: (m[0], m[2], m[1]),
                     lambda m: (m[1], m[0], m[2]),
                     lambda m: (m[2], m[1], m[0])))
    rep.add("den_symmetric", sym)

    # (b) swap symmetry of the numerators
    okb = all(_tripoly_eq(mset.phi1_num[l], _swap_yz(mset.phi1_num[l]))
              for l in mset.phi1_num)
    okb2 = all(_tripoly_eq(mset.psi2_num[l], _swap_yz(mset.psi3_num[l]))
               for l in mset.psi2_num)
    rep.add("phi1_swap_symmetric", okb)
    rep.add("psi2_psi3_swap", okb2)

    # (c) parity congruences (theta-quotient kind)
    if kind == invariants.KIND_BPRIME:
        bad = []
        for m_idx, coeffs in ((1, mset.phi1_num), (2, mset.psi2_num)):
            for l, P in coeffs.items():
                for (i, j, k), c in P.monomials.items():
                    if (i - (l + m_idx + 1)) % 2 or (i + j + p * l) % 4 \
                            or (j + k - p * (m_idx - 1)) % 4:
                        bad.append((m_idx, l, (i, j, k)))
        rep.add("num_parity", not bad, f"{len(bad)} violations")
        badd = [m for m in D.monomials
                if any(e % 2 for e in m) or (m[0] + m[1]) % 4
                or (m[1] + m[2]) % 4]
        rep.add("den_parity", not badd, f"{len(badd)} violations")

    # (a) residual identity at fresh points
    with ctx.workprec():
        worst = mpfr(0)
        worst_psi = mpfr(0)
        for t in range(trials):
            om = siegel.random_fundamental_point(rng, ctx)
            f1, f2, f3 = invariant_triple_values(om, kind, ctx)
            omp = siegel.PeriodMatrix(p * om.tau1, p * om.tau2, p * om.tau3)
            g1, g2, g3 = invariant_triple_values(omp, kind, ctx)
            den_v = _exact_eval(D, f1, f2, f3)
            coeffs = [
                _exact_eval(mset.phi1_num.get(l, interp.TriPoly()),
                            f1, f2, f3) / den_v
                for l in range(q)] + [to_mpc(1)]
            val = polys.peval(coeffs, g1)
            scale = max(max(abs(c) for c in coeffs), abs(g1) ** q)
            worst = max(worst, abs(val) / scale)
            dcoeffs = [(l + 1) * coeffs[l + 1] for l in range(q)]
            dval = polys.peval(dcoeffs, g1)
            for want, table in ((g2, mset.psi2_num), (g3, mset.psi3_num)):
                pc = [_exact_eval(table.get(l, interp.TriPoly()),
                                  f1, f2, f3) / den_v for l in range(q)]
                got = polys.peval(pc, g1) / dval
                worst_psi = max(worst_psi, abs(got - want))
        tol = mpfr(2) ** (-ctx.n_bits // 2)
        rep.add("residual_identity", worst < tol, f"worst {float(worst):.3g}")
        rep.add("psi_quotient_identity", worst_psi < tol,
                f"worst {float(worst_psi):.3g}")
    return rep


# --- file format -----------------------------------------------------------

def _write_poly(fh, name, table, with_l):
    for l in sorted(table) if with_l else [None]:
        P = table[l] if with_l else table
        for (i, j, k) in sorted(P.monomials):
            c = P.monomials[(i, j, k)]
            assert Fraction(c).denominator == 1, "non-integer coefficient"
            if with_l:
                fh.write(f"{l} {i} {j} {k} {int(c)}\n")
            else:
                fh.write(f"{i} {j} {k} {int(c)}\n")


def save_set(mset, directory):
    os.makedirs(directory, exist_ok=True)
    for poly, table, with_l in (("phi1", mset.phi1_num, True),
                                ("psi2", mset.psi2_num, True),
                                ("psi3", mset.psi3_num, True),
                                ("den", mset.denominator, False)):
        path = os.path.join(directory, f"{poly}.mpoly")
        with open(path, "w") as fh:
            fh.write("MODPOLY v1\n")
            fh.write(f"kind={mset.kind}\n")
            fh.write(f"p={mset.p}\n")
            fh.write(f"poly={poly}\n")
            if mset.kind == invariants.KIND_STRENG and with_l:
                for l in sorted(mset.alpha):
                    fh.write(f"alpha_{l}={mset.alpha[l]}\n")
                    fh.write(f"c_{l}={mset.c[l]}\n")
            _write_poly(fh, poly, table, with_l)


def load_set(directory):
    meta = {}
    tables = {}
    for poly in ("phi1", "psi2", "psi3", "den"):
        path = os.path.join(directory, f"{poly}.mpoly")
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "MODPOLY v1":
                raise ValueError(f"{path}: bad header {header!r}")
            alpha, cconst = {}, {}
            table = {}
            dmono = {}
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" in line and not line[0].isdigit() \
                        and not line.startswith("-"):
                    key, val = line.split("=", 1)
                    if key.startswith("alpha_"):
                        alpha[int(key[6:])] = int(val)
                    elif key.startswith("c_"):
                        cconst[int(key[2:])] = Fraction(val)
                    else:
                        meta[key] = val
                    continue
                parts = line.split()
                if poly == "den":
                    i, j, k, c = parts
                    dmono[(int(i), int(j), int(k))] = Fraction(int(c))
                else:
                    l, i, j, k, c = parts
                    table.setdefault(int(l), {})[
                        (int(i), int(j), int(k))] = Fraction(int(c))
            if poly == "den":
                tables["den"] = interp.TriPoly(dmono)
            else:
                tables[poly] = {l: interp.TriPoly(mm)
                                for l, mm in table.items()}
    return ModularPolynomialSet(int(meta["p"]), meta["kind"],
                                tables["phi1"], tables["psi2"],
                                tables["psi3"], tables["den"],
                                alpha, cconst)
