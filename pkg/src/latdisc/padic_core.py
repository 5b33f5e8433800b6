"""Exact matrix arithmetic over Z/p^N Z with canonical representatives."""

from __future__ import annotations

import math

INF = math.inf


class PadicError(Exception):
    pass


class NotAUnit(PadicError):
    pass


class InsufficientPrecision(PadicError):
    pass


class PrecisionMismatch(PadicError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class PadicContext:
    """Prime p and working precision N; all arithmetic happens mod p^N."""

    __slots__ = ("p", "N", "modulus")

    def __init__(self, p: int, N: int):
        if not _is_prime(p):
            raise ValueError("p must be prime, got %r" % (p,))
        if N < 1:
            raise ValueError("N must be >= 1")
        self.p = p
        self.N = N
        self.modulus = p ** N

    def __eq__(self, other):
        return isinstance(other, PadicContext) and (self.p, self.N) == (other.p, other.N)

    def __hash__(self):
        return hash((self.p, self.N))

    def __repr__(self):
        return "PadicContext(p=%d, N=%d)" % (self.p, self.N)


def valuation(x: int, ctx: PadicContext):
    """Largest k <= N with p^k | x (x read mod p^N); INF when x = 0 mod p^N."""
    x %= ctx.modulus
    if x == 0:
        return INF
    k = 0
    while x % ctx.p == 0:
        x //= ctx.p
        k += 1
    return k


def _check_same_ctx(a, b):
    if a.ctx != b.ctx:
        raise PrecisionMismatch("mixed contexts: %r vs %r" % (a.ctx, b.ctx))


class ModMatrix:
    """Immutable matrix over Z/p^N Z; entries kept reduced in [0, p^N)."""

    __slots__ = ("ctx", "rows", "cols", "entries")

    def __init__(self, ctx: PadicContext, rows_data):
        m = ctx.modulus
        ent = tuple(tuple(int(x) % m for x in row) for row in rows_data)
        self.ctx = ctx
        self.rows = len(ent)
        self.cols = len(ent[0]) if ent else 0
        if any(len(r) != self.cols for r in ent):
            raise ValueError("ragged rows")
        self.entries = ent

    @staticmethod
    def identity(ctx, n):
        return ModMatrix(ctx, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(ctx, rows, cols=None):
        if cols is None:
            cols = rows
        return ModMatrix(ctx, [[0] * cols for _ in range(rows)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, ModMatrix)
            and self.ctx == other.ctx
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.ctx, self.entries))

    def __repr__(self):
        return "ModMatrix(%r, %r)" % (self.ctx, [list(r) for r in self.entries])

    def tolists(self):
        return [list(r) for r in self.entries]

    def __add__(self, other):
        _check_same_ctx(self, other)
        m = self.ctx.modulus
        return ModMatrix(
            self.ctx,
            [
                [(a + b) % m for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
        )

    def __sub__(self, other):
        _check_same_ctx(self, other)
        m = self.ctx.modulus
        return ModMatrix(
            self.ctx,
            [
                [(a - b) % m for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
        )

    def __neg__(self):
        return ModMatrix(self.ctx, [[-a for a in r] for r in self.entries])

    def scale(self, c: int):
        return ModMatrix(self.ctx, [[c * a for a in r] for r in self.entries])

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        _check_same_ctx(self, other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        m = self.ctx.modulus
        bt = list(zip(*other.entries))
        return ModMatrix(
            self.ctx,
            [[sum(a * b for a, b in zip(row, col)) % m for col in bt] for row in self.entries],
        )

    def transpose(self):
        return ModMatrix(self.ctx, list(zip(*self.entries)))

    def is_symmetric(self):
        return self.entries == tuple(zip(*self.entries))

    def is_zero(self):
        return all(a == 0 for r in self.entries for a in r)

    def reduce_to(self, N2: int):
        """Explicit coercion to a lower-precision context."""
        if N2 > self.ctx.N:
            raise InsufficientPrecision("cannot raise precision from %d to %d" % (self.ctx.N, N2))
        return ModMatrix(PadicContext(self.ctx.p, N2), self.entries)

    def exact_div(self, k: int):
        """Divide by p^k; the result lives at precision N - k."""
        p = self.ctx.p
        pk = p ** k
        if self.ctx.N - k < 1:
            raise InsufficientPrecision("division by p^%d leaves no precision" % k)
        for r in self.entries:
            for a in r:
                if a % pk != 0:
                    raise ValueError("entry %d not divisible by p^%d" % (a, k))
        return ModMatrix(PadicContext(p, self.ctx.N - k), [[a // pk for a in r] for r in self.entries])

    def min_valuation(self):
        return min((valuation(a, self.ctx) for r in self.entries for a in r), default=INF)

    def congruent_mod(self, other, k: int):
        """Entrywise self == other mod p^k; k must not exceed the precision."""
        _check_same_ctx(self, other)
        if k > self.ctx.N:
            raise InsufficientPrecision("checking mod p^%d at precision %d" % (k, self.ctx.N))
        pk = self.ctx.p ** k
        return all(
            (a - b) % pk == 0
            for ra, rb in zip(self.entries, other.entries)
            for a, b in zip(ra, rb)
        )

    def unit_inverse(self):
        """Inverse mod p^N by Gauss-Jordan with unit pivots."""
        if self.rows != self.cols:
            raise ValueError("not square")
        n = self.rows
        m = self.ctx.modulus
        p = self.ctx.p
        a = [list(r) for r in self.entries]
        inv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = None
            for i in range(col, n):
                if a[i][col] % p != 0:
                    piv = i
                    break
            if piv is None:
                raise NotAUnit("no unit pivot in column %d" % col)
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            w = pow(a[col][col], -1, m)
            a[col] = [w * x % m for x in a[col]]
            inv[col] = [w * x % m for x in inv[col]]
            for i in range(n):
                if i == col or a[i][col] == 0:
                    continue
                c = a[i][col]
                a[i] = [(x - c * y) % m for x, y in zip(a[i], a[col])]
                inv[i] = [(x - c * y) % m for x, y in zip(inv[i], inv[col])]
        return ModMatrix(self.ctx, inv)


class BlockView:
    """Read access to the blocks M_{(i,j)} of a partitioned matrix, keyed by scale."""

    def __init__(self, mat: ModMatrix, ranks, scales=None):
        if sum(ranks) != mat.rows or sum(ranks) != mat.cols:
            raise ValueError("ranks %r do not partition a %dx%d matrix" % (ranks, mat.rows, mat.cols))
        self.mat = mat
        self.ranks = list(ranks)
        self.scales = list(scales) if scales is not None else list(range(len(ranks)))
        if len(self.scales) != len(self.ranks):
            raise ValueError("scales/ranks length mismatch")
        offs = [0]
        for r in ranks:
            offs.append(offs[-1] + r)
        self.offsets = offs
        self._pos = {s: k for k, s in enumerate(self.scales)}

    def block(self, si, sj) -> ModMatrix:
        a, b = self._pos[si], self._pos[sj]
        r0, r1 = self.offsets[a], self.offsets[a + 1]
        c0, c1 = self.offsets[b], self.offsets[b + 1]
        return ModMatrix(self.ctx, [row[c0:c1] for row in self.mat.entries[r0:r1]])

    @property
    def ctx(self):
        return self.mat.ctx


def block_view(mat: ModMatrix, ranks, scales=None) -> BlockView:
    return BlockView(mat, ranks, scales)


def assemble_blocks(ctx, ranks, block_fn):
    """Build a matrix from a callback (a, b) -> block (positional indices)."""
    k = len(ranks)
    rows = []
    for a in range(k):
        strips = [block_fn(a, b) for b in range(k)]
        for i in range(ranks[a]):
            row = []
            for b in range(k):
                blk = strips[b]
                row.extend(blk.entries[i] if isinstance(blk, ModMatrix) else blk[i])
            rows.append(row)
    return ModMatrix(ctx, rows)


def block_diag(ctx, mats):
    n = sum(m.rows for m in mats)
    rows = []
    off = 0
    for m in mats:
        for r in m.entries:
            rows.append([0] * off + list(r) + [0] * (n - off - m.cols))
        off += m.cols
    return ModMatrix(ctx, rows)
