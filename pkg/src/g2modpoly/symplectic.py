"""Sp4(Z): matrix helpers, subgroup membership, coset enumeration.

Matrices are 4x4 tuples of tuples of Python ints, in 2x2 blocks
(A B; C D).  Coset fingerprints make the breadth-first enumerations
O(1) per candidate:

  * Gamma_0(p) cosets are classified by the row space mod p of the
    bottom two rows (a Lagrangian plane), keyed by normalized Pluecker
    coordinates;
  * Gamma(2,4) cosets are classified by the matrix mod 4 up to left
    multiplication by the (64-element) image of Gamma(2,4) in Sp4(Z/4).

Cosets are taken on the side M1 ~ M2 iff M1 * M2^{-1} in subgroup.
Matrices are treated up to sign (-I acts trivially on H_2).
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BudgetExceededError, NotInGamma0Error, NumericError
from .precision import to_mpc

I4 = tuple(tuple(1 if i == j else 0 for j in range(4)) for i in range(4))
J = ((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0))


def mat_mul(M, N):
    return tuple(tuple(sum(M[i][k] * N[k][j] for k in range(4))
                       for j in range(4)) for i in range(4))


def mat_neg(M):
    return tuple(tuple(-x for x in row) for row in M)


def transpose(M):
    return tuple(tuple(M[j][i] for j in range(4)) for i in range(4))


def blocks(M):
    A = ((M[0][0], M[0][1]), (M[1][0], M[1][1]))
    B = ((M[0][2], M[0][3]), (M[1][2], M[1][3]))
    C = ((M[2][0], M[2][1]), (M[3][0], M[3][1]))
    D = ((M[2][2], M[2][3]), (M[3][2], M[3][3]))
    return A, B, C, D


def from_blocks(A, B, C, D):
    return (tuple(A[0]) + tuple(B[0]), tuple(A[1]) + tuple(B[1]),
            tuple(C[0]) + tuple(D[0]), tuple(C[1]) + tuple(D[1]))


def sp_inverse(M):
    """Inverse in Sp4: (A B; C D)^{-1} = (D^t -B^t; -C^t A^t)."""
    A, B, C, D = blocks(M)
    t = lambda X: ((X[0][0], X[1][0]), (X[0][1], X[1][1]))
    n = lambda X: ((-X[0][0], -X[0][1]), (-X[1][0], -X[1][1]))
    return from_blocks(t(D), n(t(B)), n(t(C)), t(A))


def is_symplectic(M):
    return mat_mul(mat_mul(transpose(M), J), M) == J


def _sym_m(i, j):
    m = [[0, 0], [0, 0]]
    m[i][j] = 1
    m[j][i] = 1
    return tuple(tuple(r) for r in m)


def translation(i, j):
    """Generator M_{i,j} = (I m_{i,j}; 0 I)."""
    Z = ((0, 0), (0, 0))
    E = ((1, 0), (0, 1))
    return from_blocks(E, _sym_m(i, j), Z, E)


def generators():
    """J and the three translations, with inverses (BFS generator set)."""
    gens = [J, translation(0, 0), translation(0, 1), translation(1, 1)]
    return gens + [sp_inverse(g) for g in gens]


def in_gamma0(M, p):
    _, _, C, _ = blocks(M)
    return all(c % p == 0 for row in C for c in row)


def in_g2(M):
    return all((M[i][j] - (i == j)) % 2 == 0 for i in range(4) for j in range(4))


def in_g24(M):
    if not in_g2(M):
        return False
    _, B, C, _ = blocks(M)
    return (B[0][0] % 4 == 0 and B[1][1] % 4 == 0
            and C[0][0] % 4 == 0 and C[1][1] % 4 == 0)


def membership(M, subgroup_id, p=None):
    """subgroup_id: 'gamma0' (needs p), 'g2', 'g24', 'g24&gamma0' (needs p)."""
    if subgroup_id == "gamma0":
        return in_gamma0(M, p)
    if subgroup_id == "g2":
        return in_g2(M) or in_g2(mat_neg(M))
    if subgroup_id == "g24":
        return in_g24(M) or in_g24(mat_neg(M))
    if subgroup_id == "g24&gamma0":
        return membership(M, "g24") and in_gamma0(M, p)
    raise ValueError(f"unknown subgroup {subgroup_id}")


def gamma_p(M, p):
    """(A B; C D) -> (A pB; C/p D) for M in Gamma_0(p)."""
    if not in_gamma0(M, p):
        raise NotInGamma0Error(f"C block not divisible by {p}")
    A, B, C, D = blocks(M)
    pB = tuple(tuple(p * x for x in r) for r in B)
    Cp = tuple(tuple(x // p for x in r) for r in C)
    return from_blocks(A, pB, Cp, D)


def special_matrices():
    """Named matrices used by the symmetry and parity theorems."""
    cat = {
        "gamma_sym": ((1, -3, -2, 2), (0, 1, 2, 0), (0, 0, 1, 0), (0, -4, -5, 1)),
        "gamma_prime_3": ((-5, 24, -12, 12), (-2, 19, -12, 8), (0, 6, -5, 2), (-2, 4, 0, 3)),
        "gamma_prime_5": ((-7, 6, 4, 2), (0, -7, 2, 0), (0, 10, -3, 0), (10, -8, -6, -3)),
        "gamma_prime_7": ((13, 12, -16, -6), (-10, -3, 10, 4), (56, 14, -55, -22), (30, -40, -12, -7)),
        "gamma_410": ((0, -1, 0, 0), (-1, 0, 0, 0), (0, 0, 0, -1), (0, 0, -1, 0)),
        "gamma_8316": ((1, 0, 0, 2), (-3, 1, 2, -2), (-4, 0, 1, -5), (0, 0, 0, 1)),
        "gamma_134": ((-1, 0, 0, 0), (0, -1, 0, 0), (2, 1, -1, 0), (1, 0, 0, -1)),
        "gamma_141": ((-1, 0, 0, 0), (0, -1, 0, 0), (1, 1, -1, 0), (1, 1, 0, -1)),
        "gamma_21": ((-1, 0, 0, 0), (0, -1, 0, 0), (0, 0, -1, 0), (0, 1, 0, -1)),
        "gamma_1886": ((-1, 0, 0, 0), (0, -1, 0, 0), (-1, 1, -1, 0), (1, -1, 0, -1)),
        "gamma_155": ((-1, 0, 0, 0), (0, -1, 0, 0), (0, 0, -1, 0), (0, 3, 0, -1)),
    }
    return cat


# ---------------------------------------------------------------------------
# action on H_2

def _m2mul(X, Y):
    return ((X[0][0] * Y[0][0] + X[0][1] * Y[1][0], X[0][0] * Y[0][1] + X[0][1] * Y[1][1]),
            (X[1][0] * Y[0][0] + X[1][1] * Y[1][0], X[1][0] * Y[0][1] + X[1][1] * Y[1][1]))


def cd_det(M, tau1, tau2, tau3):
    """det(C*Omega + D) for Omega = ((tau1 tau3; tau3 tau2))."""
    _, _, C, D = blocks(M)
    a = C[0][0] * tau1 + C[0][1] * tau3 + D[0][0]
    b = C[0][0] * tau3 + C[0][1] * tau2 + D[0][1]
    c = C[1][0] * tau1 + C[1][1] * tau3 + D[1][0]
    d = C[1][0] * tau3 + C[1][1] * tau2 + D[1][1]
    return a * d - b * c


def act(M, tau1, tau2, tau3, ctx=None):
    """(A*Omega+B)(C*Omega+D)^{-1} on Omega = (tau1 tau3; tau3 tau2)."""
    A, B, C, D = blocks(M)
    t1, t2, t3 = to_mpc(tau1), to_mpc(tau2), to_mpc(tau3)
    Om = ((t1, t3), (t3, t2))
    lift = lambda X: tuple(tuple(to_mpc(x) for x in r) for r in X)
    Num = _m2mul(lift(A), Om)
    Num = ((Num[0][0] + B[0][0], Num[0][1] + B[0][1]),
           (Num[1][0] + B[1][0], Num[1][1] + B[1][1]))
    Den = _m2mul(lift(C), Om)
    Den = ((Den[0][0] + D[0][0], Den[0][1] + D[0][1]),
           (Den[1][0] + D[1][0], Den[1][1] + D[1][1]))
    det = Den[0][0] * Den[1][1] - Den[0][1] * Den[1][0]
    Inv = ((Den[1][1] / det, -Den[0][1] / det),
           (-Den[1][0] / det, Den[0][0] / det))
    R = _m2mul(Num, Inv)
    defect = abs(R[0][1] - R[1][0])
    scale = max(abs(R[0][1]), abs(R[1][0]), 1)
    if ctx is not None and defect > ctx.half_tol() * scale:
        raise NumericError(f"image of H_2 point lost symmetry: defect {defect}")
    return R[0][0], R[1][1], (R[0][1] + R[1][0]) / 2


# ---------------------------------------------------------------------------
# coset fingerprints

_PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def plucker_key(M, p):
    """Normalized Pluecker coordinates of the bottom-row space mod p.

    Classifies the coset Gamma_0(p)*M (Lagrangian fingerprint)."""
    r0 = [int(M[2][j]) % p for j in range(4)]
    r1 = [int(M[3][j]) % p for j in range(4)]
    w = [(r0[i] * r1[j] - r0[j] * r1[i]) % p for i, j in _PAIRS]
    for x in w:
        if x:
            inv = pow(x, p - 2, p)
            return tuple((inv * y) % p for y in w)
    raise ValueError("bottom rows not full rank mod p")


@lru_cache(maxsize=None)
def _g24_kernel_mod4():
    """Image of Gamma(2,4) in Sp4(Z/4): the 64 matrices I+2E (and signs)
    satisfying the symplectic relation; returned as an (n,4,4) array."""
    Jm = np.array(J, dtype=np.int64) % 4
    out = []
    # m = I + 2E with E in {0,1}^{4x4}, diag(E_B) = diag(E_C) = 0
    free = [(i, j) for i in range(4) for j in range(4)
            if not (i == 0 and j == 2) and not (i == 1 and j == 3)
            and not (i == 2 and j == 0) and not (i == 3 and j == 1)]
    for bits in range(1 << len(free)):
        E = np.zeros((4, 4), dtype=np.int64)
        for t, (i, j) in enumerate(free):
            E[i, j] = (bits >> t) & 1
        m = (np.eye(4, dtype=np.int64) + 2 * E) % 4
        if ((m.T @ Jm @ m) % 4 == Jm).all():
            out.append(m)
    arr = np.array(out, dtype=np.int64)
    # sanity: the kernel has order 64 and is closed under negation (-I = I+2I)
    assert arr.shape[0] == 64
    return arr


def g24_key(M):
    """Canonical form of M mod 4 under left multiplication by the
    Gamma(2,4) image; classifies the coset Gamma(2,4)*M up to sign."""
    K = _g24_kernel_mod4()
    M4 = np.array(M, dtype=np.int64) % 4
    prods = (K @ M4) % 4
    return min(bytes(p.astype(np.uint8).reshape(16)) for p in prods)


# ---------------------------------------------------------------------------
# coset enumeration

@dataclass
class CosetTable:
    group_id: str
    subgroup_id: str
    p: int | None
    representatives: list = field(repr=False)
    key_of: dict = field(repr=False, default_factory=dict)

    def __len__(self):
        return len(self.representatives)


def enumerate_cosets(group_id, subgroup_id, p=None, budget=200000):
    if group_id == "sp4" and subgroup_id == "gamma0":
        return _enumerate_bfs(group_id, subgroup_id, p,
                              lambda M: plucker_key(M, p), budget)
    if group_id == "sp4" and subgroup_id == "g24":
        return _enumerate_bfs(group_id, subgroup_id, None, g24_key, budget)
    if group_id == "g24" and subgroup_id == "g24&gamma0":
        return _enumerate_g24_gamma0(p, budget)
    raise ValueError(f"unsupported quotient {group_id}/{subgroup_id}")


def _enumerate_bfs(group_id, subgroup_id, p, key_fn, budget):
    gens = generators()
    reps = [I4]
    seen = {key_fn(I4): 0}
    frontier = [I4]
    while frontier:
        nxt = []
        for M in frontier:
            for g in gens:
                N = mat_mul(M, g)
                k = key_fn(N)
                if k not in seen:
                    seen[k] = len(reps)
                    reps.append(N)
                    nxt.append(N)
                    if len(reps) > budget:
                        raise BudgetExceededError(
                            f"more than {budget} cosets found")
        frontier = nxt
    return CosetTable(group_id, subgroup_id, p, reps, seen)


def _schreier_generators(table, gens):
    """Schreier generators of the subgroup from a coset table of it."""
    out = set()
    for M in table.representatives:
        for g in gens:
            N = mat_mul(M, g)
            rep = table.representatives[table.key_of[g24_key(N)]]
            s = mat_mul(N, sp_inverse(rep))
            if s != I4 and mat_neg(s) not in out:
                out.add(s)
    return list(out)


def _enumerate_g24_gamma0(p, budget):
    """Representatives of Gamma(2,4) / (Gamma(2,4) cap Gamma_0(p)).

    Generators of Gamma(2,4) are obtained as Schreier generators from the
    Gamma_2/Gamma(2,4) coset table; the orbit of the Lagrangian fingerprint
    is then closed under all of them (their action factors through mod p,
    so they are deduplicated mod p and applied in bulk with numpy)."""
    top = enumerate_cosets("sp4", "g24")
    sgens = _schreier_generators(top, generators())
    arr = np.array(sgens, dtype=np.int64) % p
    uniq, idx = np.unique(arr.reshape(len(sgens), 16), axis=0, return_index=True)
    gens_int = [sgens[i] for i in idx]
    gens_mod = np.array([np.array(g, dtype=np.int64) % p for g in gens_int])

    reps = [I4]
    seen = {plucker_key(I4, p): 0}
    frontier = [I4]
    while frontier:
        nxt = []
        for M in frontier:
            Mm = np.array(M, dtype=np.int64) % p
            prods = (Mm @ gens_mod) % p
            for t in range(prods.shape[0]):
                k = plucker_key(tuple(map(tuple, prods[t])), p)
                if k not in seen:
                    N = mat_mul(M, gens_int[t])
                    seen[k] = len(reps)
                    reps.append(N)
                    nxt.append(N)
                    if len(reps) > budget:
                        raise BudgetExceededError(
                            f"more than {budget} cosets found")
        frontier = nxt
    return CosetTable("g24", "g24&gamma0", p, reps, seen)
