"""Structured F2 linear solver for the symmetric system X + X^T = M with
diagonal side conditions X_kk + sum_l X_kl z_l = b_k."""

from __future__ import annotations


class SolverError(Exception):
    pass


class NoSolution(SolverError):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class SymSystem:
    __slots__ = ("r", "M", "z", "b")

    def __init__(self, M, z, b):
        r = len(M)
        for row in M:
            if len(row) != r:
                raise ValueError("M must be square")
        if len(z) != r or len(b) != r:
            raise ValueError("z and b must have length r")
        self.r = r
        self.M = [[x & 1 for x in row] for row in M]
        self.z = [x & 1 for x in z]
        self.b = [x & 1 for x in b]
        for i in range(r):
            for j in range(r):
                if self.M[i][j] != self.M[j][i]:
                    raise ValueError("M must be symmetric")


def check_solution(sys: SymSystem, X) -> bool:
    r = sys.r
    for k in range(r):
        for l in range(r):
            if (X[k][l] + X[l][k] - sys.M[k][l]) % 2:
                return False
        s = X[k][k] + sum(X[k][l] * sys.z[l] for l in range(r))
        if (s - sys.b[k]) % 2:
            return False
    return True


def solve(sys: SymSystem):
    """Particular solution and a kernel basis, or NoSolution.

    Kernel dimension is r(r-1)/2 + (1 if z != 0 else 0).
    """
    r = sys.r
    for k in range(r):
        if sys.M[k][k]:
            raise NoSolution("nonzero-diagonal")
    acc = sum(sys.z[k] * sys.b[k] for k in range(r))
    for k in range(r):
        for l in range(k):
            acc += sys.z[k] * sys.z[l] * sys.M[k][l]
    if acc % 2:
        raise NoSolution("parity-obstruction")

    # relabel so the support of z comes first
    E = [k for k in range(r) if sys.z[k]]
    N = [k for k in range(r) if not sys.z[k]]
    perm = E + N
    e = len(E)

    # free variables in the relabeled coordinates: all strictly upper entries
    # except the pivots X_{m,m+1} for m < e-1, plus the diagonal entries in E
    # (those cancel out of their own side condition over F2)
    free_pairs = [
        (k, l)
        for k in range(r)
        for l in range(k + 1, r)
        if not (l == k + 1 and k < e - 1)
    ]
    free_diag = list(range(e))

    def build(M, b, assign_pairs, assign_diag):
        X = [[0] * r for _ in range(r)]
        for (k, l), val in assign_pairs.items():
            X[k][l] = val
        for k, val in assign_diag.items():
            X[k][k] = val
        # prefix-summed side conditions determine X_{m,m+1} for m < e-1
        for m in range(e - 1):
            rhs = sum(b[k] for k in range(m + 1)) & 1
            rhs ^= sum(M[k][l] for k in range(m + 1) for l in range(k)) & 1
            s = 0
            for k in range(m + 1):
                for l in range(m + 1, e):
                    if (k, l) != (m, m + 1):
                        s ^= X[k][l]
            X[m][m + 1] = rhs ^ s
        # below-diagonal entries from X + X^T = M
        for k in range(r):
            for l in range(k):
                X[k][l] = M[k][l] ^ X[l][k]
        # diagonal pivots for the complement of E
        for k in range(e, r):
            s = 0
            for l in range(e):
                s ^= X[k][l]
            X[k][k] = b[k] ^ s
        return X

    Mp = [[sys.M[perm[i]][perm[j]] for j in range(r)] for i in range(r)]
    bp = [sys.b[perm[i]] for i in range(r)]
    Z = [[0] * r for _ in range(r)]
    zero = [0] * r

    none_pairs = {pair: 0 for pair in free_pairs}
    none_diag = {k: 0 for k in free_diag}
    Xp = build(Mp, bp, none_pairs, none_diag)

    kernel = []
    for pair in free_pairs:
        d = dict(none_pairs)
        d[pair] = 1
        kernel.append(build(Z, zero, d, none_diag))
    for k in free_diag:
        d = dict(none_diag)
        d[k] = 1
        kernel.append(build(Z, zero, none_pairs, d))

    # undo the relabeling
    inv = [0] * r
    for i, pi in enumerate(perm):
        inv[pi] = i

    def unperm(X):
        return [[X[inv[i]][inv[j]] for j in range(r)] for i in range(r)]

    Xp = unperm(Xp)
    kernel = [unperm(K) for K in kernel]

    assert check_solution(sys, Xp), "particular solution check failed"
    hom = SymSystem([[0] * r for _ in range(r)], sys.z, [0] * r)
    for K in kernel:
        assert check_solution(hom, K), "kernel element check failed"
    assert len(kernel) == r * (r - 1) // 2 + (1 if e else 0), "unexpected kernel size"
    return Xp, kernel
