"""Quadratic Hensel lifting of approximate isometries between Z_p-lattices."""

from __future__ import annotations

from .padic_core import PadicContext, ModMatrix
from . import jordan as jd
from . import f2_solver as fs


class HenselError(Exception):
    pass


class NotApproximate(HenselError):
    pass


class InsufficientLevel(HenselError):
    pass


# ---------------------------------------------------------------------------
# raw integer matrix helpers; all arithmetic mod m with generous working width


def _mul(A, B, m):
    n, k = len(A), len(B)
    cols = len(B[0]) if B else 0
    return [
        [sum(A[i][t] * B[t][j] for t in range(k)) % m for j in range(cols)]
        for i in range(n)
    ]


def _sub(A, B, m):
    return [[(x - y) % m for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def _tr(A):
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def _eye(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _inv(A, p, W):
    ctx = PadicContext(p, W)
    return ModMatrix(ctx, A).unit_inverse().tolists()


def _div(A, pk):
    out = []
    for row in A:
        r = []
        for x in row:
            if x % pk:
                raise NotApproximate("entry not divisible by %d" % pk)
            r.append(x // pk)
        out.append(r)
    return out


def _val(x, p):
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# block bookkeeping


def _offsets(blocks):
    offs = []
    pos = 0
    for _, r in blocks:
        offs.append((pos, pos + r))
        pos += r
    return offs


def _block(A, offs, bi, bj):
    (a0, a1), (b0, b1) = offs[bi], offs[bj]
    return [row[b0:b1] for row in A[a0:a1]]


def infer_blocks(G: ModMatrix):
    """Block structure (scale, rank) of a gram already in Jordan form."""
    J = jd.jordan_decompose(G)
    if J.assembled() != G:
        raise ValueError("gram must be block diagonal in Jordan form")
    return list(zip(J.scales, J.ranks))


def is_compatible(F: ModMatrix, blocks) -> bool:
    """F_{(i,j)} == 0 mod p^{max(i-j,0)} for all block pairs."""
    p = F.ctx.p
    offs = _offsets(blocks)
    rows = F.tolists()
    for bi, (i, _) in enumerate(blocks):
        for bj, (j, _) in enumerate(blocks):
            e = max(i - j, 0)
            if e == 0:
                continue
            for row in _block(rows, offs, bi, bj):
                for x in row:
                    if x % p ** e:
                        return False
    return True


def _oddity_vectors(Z, blocks, p, W):
    """Oddity vector of each diagonal block of Z (p = 2)."""
    offs = _offsets(blocks)
    out = []
    for bi, (i, r) in enumerate(blocks):
        blk = _div(_block(Z, offs, bi, bi), p ** i)
        inv = _inv(blk, p, W)
        y = [blk[k][k] for k in range(r)]
        out.append([sum(y[k] * inv[k][j] for k in range(r)) % 2 ** W for j in range(r)])
    return out


def _level_raw(F, G, Z, blocks, p, cap):
    offs = _offsets(blocks)
    m = p ** (cap + max(i for i, _ in blocks) + 3)
    A = _sub(_mul(_mul(F, G, m), _tr(F), m), Z, m)
    a = cap
    for bi, (i, _) in enumerate(blocks):
        for bj, (j, _) in enumerate(blocks):
            for row in _block(A, offs, bi, bj):
                for x in row:
                    v = _val(x % m, p)
                    if v is not None:
                        a = min(a, v - max(i, j))
    if p == 2:
        for bi, (i, r) in enumerate(blocks):
            blk = _block(A, offs, bi, bi)
            for k in range(r):
                v = _val(blk[k][k] % m, p)
                if v is not None:
                    a = min(a, v - i - 1)
    if a <= 0:
        return 0
    if p == 2 and a == 1:
        vecs = _oddity_vectors(Z, blocks, p, cap + 4)
        for bi, (i, r) in enumerate(blocks):
            blk = _block(A, offs, bi, bi)
            v = vecs[bi]
            tot = sum(v[k] * blk[k][l] * v[l] for k in range(r) for l in range(r))
            if tot % 2 ** (i + 3):
                return 0
    return a


def approximation_level(F: ModMatrix, G: ModMatrix, Z: ModMatrix, blocks=None) -> int:
    """Largest a (capped at N - maxscale - 3) making (F, G, Z) a-approximate; 0 if none."""
    if blocks is None:
        blocks = infer_blocks(G)
    if not is_compatible(F, blocks):
        return 0
    p = F.ctx.p
    cap = F.ctx.N - max(i for i, _ in blocks) - 3
    if cap < 1:
        raise jd.InsufficientPrecision("precision too low to measure any level")
    return _level_raw(F.tolists(), G.tolists(), Z.tolists(), blocks, p, cap)


# ---------------------------------------------------------------------------
# the three lifting algorithms, on raw integer matrices mod p^W


def _hensel_unimodular_odd(F, G, Z, a, b, p, W):
    m = p ** W
    inv2 = pow(2, -1, m)
    while a < b:
        A = _sub(_mul(_mul(F, G, m), _tr(F), m), Z, m)
        X = _mul([[x * inv2 % m for x in row] for row in A], _inv(_mul(G, _tr(F), m), p, W), m)
        F = _sub(F, X, m)
        a = 2 * a
    return F


def _hensel_unimodular_even(F, G, Z, a, b, p, W):
    m = 2 ** W
    r = len(F)
    if a == 1 and b > 1:
        A = _sub(_mul(_mul(F, G, m), _tr(F), m), Z, m)
        M = [[x % 2 for x in row] for row in _div(A, 2)]
        bvec = [(_div([[A[k][k]]], 4)[0][0]) % 2 for k in range(r)]
        Zinv = _inv(Z, p, W)
        z = [Zinv[k][k] % 2 for k in range(r)]
        X, _ = fs.solve(fs.SymSystem(M, z, bvec))
        Y = _mul([[2 * x for x in row] for row in X], _inv(_mul(G, _tr(F), m), p, W), m)
        F = _sub(F, Y, m)
        a = 2
    while a < b:
        A = _sub(_mul(_mul(F, G, m), _tr(F), m), Z, m)
        L = [[A[i][j] if j > i else 0 for j in range(r)] for i in range(r)]
        half_diag = [_div([[A[k][k]]], 2)[0][0] for k in range(r)]
        LD = [[(L[i][j] + (half_diag[i] if i == j else 0)) % m for j in range(r)] for i in range(r)]
        X = _mul(LD, _inv(_mul(G, _tr(F), m), p, W), m)
        F = _sub(F, X, m)
        a = 2 * a - 1
    return F


def _hensel_qf_raw(F, G, Z, a, b, blocks, p, W):
    if a >= b or not blocks:
        return F
    m = p ** W
    i1, r1 = blocks[0]
    n = len(F)
    F11 = [row[:r1] for row in F[:r1]]
    F12 = [row[r1:] for row in F[:r1]]
    F21 = [row[:r1] for row in F[r1:]]
    F22 = [row[r1:] for row in F[r1:]]
    G1 = [row[:r1] for row in G[:r1]]
    G2 = [row[r1:] for row in G[r1:]]
    Z11 = [row[:r1] for row in Z[:r1]]
    Z12 = [row[r1:] for row in Z[:r1]]
    Z21 = [row[:r1] for row in Z[r1:]]
    Z22 = [row[r1:] for row in Z[r1:]]

    if len(blocks) > 1:
        Z11p = _sub(Z11, _mul(_mul(F12, G2, m), _tr(F12), m), m)
    else:
        Z11p = Z11
    pk = p ** i1
    G1u = _div(G1, pk)
    Z11u = _div(Z11p, pk)
    if p == 2:
        F11 = _hensel_unimodular_even(F11, G1u, Z11u, a, b, p, W)
    else:
        F11 = _hensel_unimodular_odd(F11, G1u, Z11u, a, b, p, W)

    if len(blocks) > 1:
        s = blocks[1][0] - i1
        while a < b:
            Z22p = _sub(Z22, _mul(_mul(F21, G1, m), _tr(F21), m), m)
            F22 = _hensel_qf_raw(F22, G2, Z22p, a, a + s, blocks[1:], p, W)
            num = _sub(Z21, _mul(_mul(F22, G2, m), _tr(F12), m), m)
            W1 = _inv(_mul(G1u, _tr(F11), m), p, W)
            F21 = _div(_mul(num, W1, m), pk)
            a += s

    out = [row[:] for row in F]
    for i in range(r1):
        out[i][:r1] = F11[i]
        out[i][r1:] = F12[i]
    for i in range(n - r1):
        out[r1 + i][:r1] = F21[i]
        out[r1 + i][r1:] = F22[i]
    return out


def _dispatch(F, G, Z, a, b, blocks, p, W, which):
    m = p ** W
    F = [[x % m for x in row] for row in F]
    G = [[x % m for x in row] for row in G]
    Z = [[x % m for x in row] for row in Z]
    if which == "odd":
        return _hensel_unimodular_odd(F, G, Z, a, b, p, W)
    if which == "even":
        return _hensel_unimodular_even(F, G, Z, a, b, p, W)
    return _hensel_qf_raw(F, G, Z, a, b, blocks, p, W)


def _lift(F: ModMatrix, G: ModMatrix, Z: ModMatrix, a: int, b: int, blocks, which) -> ModMatrix:
    if a < 1:
        raise ValueError("a must be >= 1")
    ctx = F.ctx
    p = ctx.p
    if blocks is None:
        blocks = infer_blocks(G)
    maxsc = max(i for i, _ in blocks)
    lvl = approximation_level(F, G, Z, blocks)
    if lvl < min(a, ctx.N - maxsc - 3):
        raise NotApproximate("input triple is not %d-approximate (level %d)" % (a, lvl))
    if b <= a:
        return F
    # working width absorbs exact-division losses in the recursion
    W = ctx.N + (b + 4) * (maxsc + 2) + 16
    out = _dispatch(F.tolists(), G.tolists(), Z.tolists(), a, b, blocks, p, W, which)
    m = ctx.modulus
    res = ModMatrix(ctx, [[x % m for x in row] for row in out])
    got = approximation_level(res, G, Z, blocks)
    want = min(b, ctx.N - maxsc - 3)
    if got < want:
        raise InsufficientLevel("lift reached level %d < %d" % (got, want))
    return res


def hensel_unimodular_odd(F, G, Z, a, b):
    if F.ctx.p == 2:
        raise ValueError("use hensel_unimodular_even at p = 2")
    return _lift(F, G, Z, a, b, [(0, F.rows)], "odd")


def hensel_unimodular_even(F, G, Z, a, b):
    if F.ctx.p != 2:
        raise ValueError("hensel_unimodular_even needs p = 2")
    return _lift(F, G, Z, a, b, [(0, F.rows)], "even")


def hensel_qf(F, G, Z, a, b, blocks=None):
    return _lift(F, G, Z, a, b, blocks, "qf")
