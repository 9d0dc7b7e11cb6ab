"""Trivariate polynomial and rational-function interpolation from
black-box evaluations.

The rational case works through the scaled substitution
G(X, Y, Z) = F(X, XY, XZ): every monomial X^i Y^j Z^k of F becomes
X^(i+j+k) Y^j Z^k, so for fixed (y, z) the function G(X, y, z) is a
univariate rational function whose degrees are the total degrees of F.
Crucially, the constant X-coefficient of the substituted denominator is
the constant coefficient of B itself, independent of (y, z); normalizing
every slice by it makes the per-slice Cauchy interpolants consistent
across the grid.  Without this normalization the slice interpolants are
each off by their own scalar and the outer interpolation returns
garbage; the regression tests pin the two known failure cases.
"""

import cmath
import math
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpfr

from . import polys
from .errors import (DegenerateError, IllConditionedError,
                     NormalizationZeroError, UnstableError)
from .precision import to_mpc


@dataclass
class TriPoly:
    """Sparse trivariate polynomial, monomial map (i, j, k) -> coefficient."""

    monomials: dict = field(default_factory=dict)

    def prune(self, tol):
        if not self.monomials:
            return self
        top = max(abs(c) for c in self.monomials.values())
        keep = {m: c for m, c in self.monomials.items() if abs(c) > tol * top}
        return TriPoly(keep)

    def evaluate(self, x, y, z):
        s = to_mpc(0)
        for (i, j, k), c in self.monomials.items():
            s += c * x ** i * y ** j * z ** k
        return s

    def degrees(self):
        """(dx, dy, dz) per-variable maxima; (0, 0, 0) when empty."""
        if not self.monomials:
            return (0, 0, 0)
        return tuple(max(m[t] for m in self.monomials) for t in range(3))

    def total_degree(self):
        if not self.monomials:
            return 0
        return max(i + j + k for i, j, k in self.monomials)

    def scale(self, c):
        return TriPoly({m: v * c for m, v in self.monomials.items()})

    def map_coeffs(self, fn):
        return TriPoly({m: fn(v) for m, v in self.monomials.items()})


@dataclass
class TriRat:
    num: TriPoly
    den: TriPoly

    def evaluate(self, x, y, z):
        return self.num.evaluate(x, y, z) / self.den.evaluate(x, y, z)


@dataclass(frozen=True)
class DegreeProfile:
    num_dx: int
    num_dy: int
    num_dz: int
    den_dx: int
    den_dy: int
    den_dz: int
    num_total: int
    den_total: int


def circle_nodes(m, center=0.0, radius=1.0, phase=0.37):
    """m equispaced nodes on a circle; the phase offset avoids symmetric
    real-axis collisions."""
    return [to_mpc(complex(center) + radius
                   * cmath.exp(2j * math.pi * (k + phase) / m))
            for k in range(m)]


def disk_nodes(m, rng, center=0.0, radius=0.25, min_gap=None):
    """m random nodes in a disk with an enforced pairwise gap."""
    if min_gap is None:
        min_gap = radius / (4 * m)
    out = []
    for _ in range(m):
        for _attempt in range(200):
            z = complex(center) + radius * math.sqrt(rng.random()) \
                * cmath.exp(2j * math.pi * rng.random())
            if all(abs(z - complex(w)) > min_gap for w in out):
                out.append(to_mpc(z))
                break
        else:
            raise IllConditionedError("cannot place disk nodes with min gap")
    return out


def cauchy_interp_uni(nodes, values, degA, degB, ctx, tol=None):
    """Rational interpolant (A, B) with deg A <= degA, deg B <= degB.

    Uses one extended-Euclid row on (interpolant, node polynomial).
    Raises DegenerateError when the recovered degrees fall strictly below
    the requested ones (unlucky specialization; the caller re-samples)."""
    m = len(nodes)
    if m < degA + degB + 1:
        raise ValueError("need at least degA + degB + 1 nodes")
    if tol is None:
        tol = mpfr(2) ** (-ctx.n_bits // 4)
    g = polys.poly_product_tree(nodes)
    f = polys.interp_poly_uni(nodes, values)
    r, t = polys.ext_euclid_row(g, f, degA + 1, ctx)
    r = polys.trim(r, tol)
    t = polys.trim(t, tol)
    if polys.degree(r) < degA or polys.degree(t) < degB:
        raise DegenerateError(
            f"degrees ({polys.degree(r)}, {polys.degree(t)}) below "
            f"requested ({degA}, {degB})")
    return r, t


def interp_poly_multi(grid_values, nodes_x, nodes_y, nodes_z, ctx, tol=None):
    """Exact trivariate interpolant from a full tensor grid.

    grid_values[ix][iy][iz] = P(x_ix, y_iy, z_iz).  Nested univariate
    Newton interpolation, innermost in x."""
    if tol is None:
        tol = mpfr(2) ** (-ctx.n_bits // 2)
    nx, ny, nz = len(nodes_x), len(nodes_y), len(nodes_z)
    # c1[iy][iz] = x-coefficient vectors
    c1 = [[polys.interp_poly_uni(nodes_x,
                                 [grid_values[ix][iy][iz] for ix in range(nx)])
           for iz in range(nz)] for iy in range(ny)]
    out = {}
    for i in range(nx):
        # for this x-degree, interpolate over y then z
        cz = []
        for iz in range(nz):
            vy = [c1[iy][iz][i] if i < len(c1[iy][iz]) else to_mpc(0)
                  for iy in range(ny)]
            cz.append(polys.interp_poly_uni(nodes_y, vy))
        for j in range(ny):
            vz = [cz[iz][j] if j < len(cz[iz]) else to_mpc(0)
                  for iz in range(nz)]
            ck = polys.interp_poly_uni(nodes_z, vz)
            for k, c in enumerate(ck):
                out[(i, j, k)] = c
    return TriPoly(out).prune(tol)


def _shift_tripoly(P, shift):
    """P(X + r, Y + s, Z + t) expanded, one variable at a time."""
    r, s, t = shift
    if r == 0 and s == 0 and t == 0:
        return P
    out = P.monomials
    for axis, c in ((0, r), (1, s), (2, t)):
        if c == 0:
            continue
        cc = to_mpc(c)
        new = {}
        for m, v in out.items():
            d = m[axis]
            # (V + c)^d expansion
            binom = 1
            power = to_mpc(1)
            for e in range(d, -1, -1):
                mm = list(m)
                mm[axis] = e
                mm = tuple(mm)
                new[mm] = new.get(mm, to_mpc(0)) + v * binom * power
                binom = binom * e // (d - e + 1)
                power = power * cc
        out = new
    return TriPoly(out)


def denormalize_tripoly(P, centers, radii):
    """Map a polynomial fitted in u = (x - center)/radius coordinates back
    to raw coordinates.  Exact linear change of basis; done at working
    precision so the only error is the rounding of the inputs."""
    rx, ry, rz = (to_mpc(r) for r in radii)
    scaled = {m: c / (rx ** m[0] * ry ** m[1] * rz ** m[2])
              for m, c in P.monomials.items()}
    return _shift_tripoly(TriPoly(scaled),
                          (-centers[0], -centers[1], -centers[2]))


def _back_substitute(sub, tol):
    """Undo X^n Y^j Z^k -> X^(n - j - k) Y^j Z^k; drop noise monomials."""
    top = max((abs(c) for c in sub.monomials.values()), default=mpfr(0))
    out = {}
    for (n, j, k), c in sub.monomials.items():
        i = n - j - k
        if i < 0:
            if abs(c) > tol * top:
                raise DegenerateError(
                    f"monomial X^{n} Y^{j} Z^{k} has no preimage under the "
                    "scaled substitution (degree profile too small?)")
            continue
        out[(i, j, k)] = out.get((i, j, k), to_mpc(0)) + c
    return TriPoly(out)


def interp_rat_tri(evaluator, profile, ctx, rng, shift=(0, 0, 0),
                   x_center=0.0, x_radius=1.0, y_center=0.3, z_center=0.3,
                   parity=None, max_retries=8):
    """Trivariate rational interpolant of a black box, via the scaled
    substitution and slice-wise normalized Cauchy interpolation.

    evaluator(x, y, z) -> value of F.  profile bounds all degrees.
    shift = (r, s, t) interpolates F(X + r, Y + s, Z + t) internally and
    shifts back; use it when the denominator's constant term vanishes.
    parity: optional predicate(i, j, k, is_den) -> bool; violating
    monomials must be numerically negligible and are removed."""
    r0, s0, t0 = shift

    def ev(x, y, z):
        return evaluator(x + r0, y + s0, z + t0)

    dA, dB = profile.num_total, profile.den_total
    cap = max(dA, dB)
    m = 2 * cap + 1
    ny, nz = profile.num_dy + 1, profile.num_dz + 1
    ny = max(ny, profile.den_dy + 1)
    nz = max(nz, profile.den_dz + 1)
    xs = circle_nodes(m, center=x_center, radius=x_radius)
    fx = polys.poly_product_tree(xs)
    norm_tol = mpfr(2) ** (-ctx.n_bits // 3)
    trim_tol = mpfr(2) ** (-ctx.n_bits // 4)

    def slice_fraction(y, z, expected=None):
        """Normalized Cauchy interpolant of the slice; DEGENERATE when the
        observed degrees fall below the generic ones."""
        vals = [ev(x, x * y, x * z) for x in xs]
        g = polys.interp_poly_uni(xs, vals)
        num, den = polys.ext_euclid_row(fx, g, cap + 1, ctx)
        num = polys.trim(num, trim_tol)
        den = polys.trim(den, trim_tol)
        degs = (polys.degree(num), polys.degree(den))
        if expected is not None and degs != expected:
            raise DegenerateError(
                f"slice degrees {degs} below generic {expected}")
        c0 = den[0]
        if abs(c0) < norm_tol * max(abs(c) for c in den):
            raise NormalizationZeroError(
                "denominator constant term vanishes; use a shift")
        num = [c / c0 for c in num] + [to_mpc(0)] * (dA + 1 - len(num))
        den = [c / c0 for c in den] + [to_mpc(0)] * (dB + 1 - len(den))
        return num, den, degs

    # generic slice degrees from probe slices (max componentwise)
    expected = (0, 0)
    for _ in range(2):
        yp = disk_nodes(1, rng, center=y_center)[0]
        zp = disk_nodes(1, rng, center=z_center)[0]
        _, _, degs = slice_fraction(yp, zp)
        expected = (max(expected[0], degs[0]), max(expected[1], degs[1]))
    if expected[0] > dA or expected[1] > dB:
        raise DegenerateError(
            f"observed slice degrees {expected} exceed the profile bounds "
            f"({dA}, {dB})")

    zs = disk_nodes(nz, rng, center=z_center)
    num_grid = []   # [iz][iy] -> coefficient vector in x
    den_grid = []
    y_nodes_per_z = []
    for iz in range(nz):
        rows_n, rows_d = [], []
        ys = disk_nodes(ny, rng, center=y_center)
        iy = 0
        retries = 0
        while iy < ny:
            try:
                n_c, d_c, _ = slice_fraction(ys[iy], zs[iz], expected)
            except DegenerateError:
                retries += 1
                if retries > max_retries:
                    raise
                ys[iy] = disk_nodes(1, rng, center=y_center)[0]
                continue
            rows_n.append(n_c)
            rows_d.append(d_c)
            iy += 1
        num_grid.append(rows_n)
        den_grid.append(rows_d)
        y_nodes_per_z.append(ys)

    def assemble(grid, dcount):
        # grid[iz][iy][n] -> TriPoly in substituted form (n, j, k)
        out = {}
        for n in range(dcount + 1):
            per_z = []
            for iz in range(nz):
                vy = [grid[iz][iy][n] for iy in range(ny)]
                per_z.append(polys.interp_poly_uni(y_nodes_per_z[iz], vy))
            for j in range(ny):
                vz = [per_z[iz][j] if j < len(per_z[iz]) else to_mpc(0)
                      for iz in range(nz)]
                ck = polys.interp_poly_uni(zs, vz)
                for k, c in enumerate(ck):
                    out[(n, j, k)] = c
        return TriPoly(out).prune(mpfr(2) ** (-ctx.n_bits // 2))

    tol = mpfr(2) ** (-ctx.n_bits // 3)
    num = _back_substitute(assemble(num_grid, dA), tol)
    den = _back_substitute(assemble(den_grid, dB), tol)
    num = _shift_tripoly(num, (-r0, -s0, -t0))
    den = _shift_tripoly(den, (-r0, -s0, -t0))
    if parity is not None:
        num = _apply_parity(num, parity, False, tol)
        den = _apply_parity(den, parity, True, tol)
    return TriRat(num, den)


def _apply_parity(P, parity, is_den, tol):
    top = max((abs(c) for c in P.monomials.values()), default=mpfr(0))
    out = {}
    for m, c in P.monomials.items():
        if parity(*m, is_den):
            out[m] = c
        elif abs(c) > tol * top:
            raise DegenerateError(
                f"monomial {m} violates the parity constraints with a "
                "non-negligible coefficient")
    return TriPoly(out)


def _probe_degrees(values, nodes, cap, ctx, tol, center=0.0, radius=1.0):
    """True (num, den) degrees of a univariate rational sample with both
    degrees <= cap, from 2*cap + 1 values.

    The fit runs in the normalized variable u = (x - center)/radius so
    the nodes sit on the unit circle; interpolation through m nodes on a
    small circle is otherwise catastrophically ill-conditioned (error
    amplification ~ radius^-m).  Degrees are invariant under the affine
    change.

    The caller must supply enough working precision that the evaluation
    noise, amplified through the Euclid chain, stays below the strip
    threshold; otherwise the degree jump is buried and the row comes
    back as a contaminated common multiple with inflated degrees."""
    unodes = [(to_mpc(x) - center) / radius for x in nodes]
    g = polys.poly_product_tree(unodes)
    f = polys.interp_poly_uni(unodes, values)
    r, t = polys.ext_euclid_row(g, f, cap + 1, ctx)
    r = polys.trim(r, tol)
    t = polys.trim(t, tol)
    return polys.degree(r), polys.degree(t)


def discover_degrees(evaluator, ctx, rng, cap_total=40, cap_var=40,
                     samples=3, shifts=2, budget=6,
                     x_center=0.0, x_radius=1.0,
                     y_center=0.4, y_radius=0.25,
                     z_center=0.4, z_radius=0.25):
    """Degree profile of a black-box trivariate rational function.

    Total degrees come from probes along (x, xy, xz); per-variable
    degrees from probes varying one variable at a time.  Maxima are
    taken over several random slice choices and shifts; the answer must
    stabilize within the budget or UNSTABLE is raised.  The node
    geometry is configurable so that probes stay inside the evaluator's
    reachable region."""
    tol = mpfr(2) ** (-ctx.n_bits // 4)
    centers = (x_center, y_center, z_center)
    radii = (x_radius, y_radius, z_radius)
    xc = x_center if x_center else 1.0

    def jitter(axis):
        return complex(centers[axis]) + radii[axis] * (
            0.4 + 0.5 * rng.random()) * cmath.exp(2j * math.pi * rng.random())

    def total_probe(shift):
        r, s, t = shift
        # ratios so that (x, x*y, x*z) lands near the y and z regions
        y = jitter(1) / xc
        z = jitter(2) / xc
        xs = circle_nodes(2 * cap_total + 1, center=x_center,
                          radius=x_radius, phase=rng.random())
        vals = [evaluator(x + r, x * y + s, x * z + t) for x in xs]
        return _probe_degrees(vals, xs, cap_total, ctx, tol,
                              center=x_center, radius=x_radius)

    def var_probe(axis, shift):
        r, s, t = shift
        fixed = [jitter(a) for a in range(3)]
        xs = circle_nodes(2 * cap_var + 1, center=centers[axis],
                          radius=radii[axis], phase=rng.random())
        vals = []
        for x in xs:
            pt = list(fixed)
            pt[axis] = x
            vals.append(evaluator(pt[0] + r, pt[1] + s, pt[2] + t))
        return _probe_degrees(vals, xs, cap_var, ctx, tol,
                              center=centers[axis], radius=radii[axis])

    shift_list = [(0, 0, 0)] + [
        tuple(0.15 * radii[a] * rng.random() for a in range(3))
        for _ in range(shifts - 1)]
    best = [0] * 8  # num dx dy dz, den dx dy dz, num_total, den_total order
    stable = 0
    for round_no in range(budget):
        cur = list(best)
        for sh in shift_list:
            for _ in range(samples):
                da, db = total_probe(sh)
                cur[6] = max(cur[6], da)
                cur[7] = max(cur[7], db)
            for axis in range(3):
                da, db = var_probe(axis, sh)
                cur[axis] = max(cur[axis], da)
                cur[3 + axis] = max(cur[3 + axis], db)
        if cur == best and round_no > 0:
            stable += 1
            if stable >= 1:
                return DegreeProfile(cur[0], cur[1], cur[2],
                                     cur[3], cur[4], cur[5], cur[6], cur[7])
        else:
            stable = 0
        best = cur
    raise UnstableError("degree probes did not stabilize within budget")
