"""Jordan decompositions of symmetric matrices over Z_p."""

from __future__ import annotations

from fractions import Fraction

from .padic_core import ModMatrix, PadicContext, InsufficientPrecision, block_diag
from .elementary_forms import ElementaryForm


class JordanError(Exception):
    pass


class SingularGram(JordanError):
    pass


class WrongPrime(JordanError):
    pass


PRECISION_MARGIN = 3


def _frac_val(x: Fraction, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _frac_mod(x: Fraction, modulus: int) -> int:
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


class JordanBlock:
    __slots__ = ("scale", "rank", "gram", "parity", "oddity_vector")

    def __init__(self, scale, rank, gram: ModMatrix, parity=None, oddity_vector=None):
        self.scale = scale
        self.rank = rank
        self.gram = gram
        self.parity = parity
        self.oddity_vector = oddity_vector

    def oddity(self):
        """b(v, v) mod 8 for the oddity vector v."""
        if self.oddity_vector is None:
            raise WrongPrime("oddity is a p=2 invariant")
        v = self.oddity_vector
        g = self.gram
        return sum(v[i] * g[i, j] * v[j] for i in range(self.rank) for j in range(self.rank)) % 8

    def is_odd(self):
        return self.parity == "odd"

    def json(self):
        out = {"scale": self.scale, "rank": self.rank, "gram": self.gram.tolists()}
        if self.parity is not None:
            out["parity"] = self.parity
            out["oddity"] = self.oddity()
        return out


class JordanDecomposition:
    __slots__ = ("ctx", "blocks", "base_change", "source_gram")

    def __init__(self, ctx, blocks, base_change, source_gram):
        self.ctx = ctx
        self.blocks = blocks
        self.base_change = base_change
        self.source_gram = source_gram

    @property
    def scales(self):
        return [b.scale for b in self.blocks]

    @property
    def ranks(self):
        return [b.rank for b in self.blocks]

    @property
    def rank(self):
        return sum(b.rank for b in self.blocks)

    def max_scale(self):
        return self.blocks[-1].scale

    def block_at(self, i):
        for b in self.blocks:
            if b.scale == i:
                return b
        return None

    def assembled(self) -> ModMatrix:
        """blockdiag(p^i * gram_i) at working precision."""
        p = self.ctx.p
        return block_diag(
            self.ctx, [b.gram.scale(p ** b.scale) for b in self.blocks]
        )

    def parity_at(self, i) -> int:
        """t_i: 1 if the block at scale i exists and is odd, else 0."""
        b = self.block_at(i)
        return 1 if (b is not None and b.parity == "odd") else 0

    def rank_at(self, i) -> int:
        b = self.block_at(i)
        return b.rank if b is not None else 0


def oddity_vector_of(gram: ModMatrix):
    """y * gram^{-1} with y the diagonal of gram (p = 2 only)."""
    if gram.ctx.p != 2:
        raise WrongPrime("oddity vectors live at p = 2")
    inv = gram.unit_inverse()
    n = gram.rows
    m = gram.ctx.modulus
    return tuple(
        sum(gram[k, k] * inv[k, j] for k in range(n)) % m for j in range(n)
    )


def jordan_decompose(G: ModMatrix) -> JordanDecomposition:
    """Symmetric elimination with minimal-valuation pivots, lowest index first."""
    ctx = G.ctx
    p = ctx.p
    if not G.is_symmetric():
        raise ValueError("gram must be symmetric")
    r = G.rows
    A = [[Fraction(G[i, j]) for j in range(r)] for i in range(r)]
    U = [[Fraction(1 if i == j else 0) for j in range(r)] for i in range(r)]

    def swap(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        for row in A:
            row[i], row[j] = row[j], row[i]
        U[i], U[j] = U[j], U[i]

    def row_op(i, j, c):
        # row_i += c * row_j on (A, U), and the mirrored column op on A
        A[i] = [x + c * y for x, y in zip(A[i], A[j])]
        U[i] = [x + c * y for x, y in zip(U[i], U[j])]
        for row in A:
            row[i] += c * row[j]

    spans = []
    pos = 0
    while pos < r:
        best = None
        for i in range(pos, r):
            for j in range(pos, r):
                if A[i][j] != 0:
                    v = _frac_val(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            raise SingularGram("gram is singular at working precision")
        v = best[0]
        diag_k = next(
            (k for k in range(pos, r) if A[k][k] != 0 and _frac_val(A[k][k], p) == v),
            None,
        )
        if diag_k is None and p != 2:
            # make a diagonal pivot: add the partner row of the best off-diagonal
            _, i, j = min(
                (( _frac_val(A[i][j], p), i, j)
                 for i in range(pos, r)
                 for j in range(pos, r)
                 if i != j and A[i][j] != 0 and _frac_val(A[i][j], p) == v),
            )
            row_op(i, j, Fraction(1))
            diag_k = i
        if diag_k is not None:
            swap(pos, diag_k)
            a = A[pos][pos]
            for i in range(pos + 1, r):
                if A[i][pos] != 0:
                    row_op(i, pos, -A[i][pos] / a)
            spans.append((pos, 1))
            pos += 1
        else:
            # p = 2, split a 2x2 block on the minimal off-diagonal entry
            _, i, j = min(
                ((_frac_val(A[i][j], p), i, j)
                 for i in range(pos, r)
                 for j in range(i + 1, r)
                 if A[i][j] != 0 and _frac_val(A[i][j], p) == v),
            )
            swap(pos, i)
            # j > i >= pos, so j is unaffected by the first swap
            swap(pos + 1, j)
            a, b, d = A[pos][pos], A[pos][pos + 1], A[pos + 1][pos + 1]
            det = a * d - b * b
            for i2 in range(pos + 2, r):
                x, y = A[i2][pos], A[i2][pos + 1]
                if x == 0 and y == 0:
                    continue
                # (c1, c2) = (x, y) * [[a, b], [b, d]]^{-1}
                c1 = (x * d - y * b) / det
                c2 = (y * a - x * b) / det
                if c1 != 0:
                    row_op(i2, pos, -c1)
                if c2 != 0:
                    row_op(i2, pos + 1, -c2)
            spans.append((pos, 2))
            pos += 2

    scaled = []
    for start, size in spans:
        sc = min(
            _frac_val(A[i][j], p)
            for i in range(start, start + size)
            for j in range(start, start + size)
            if A[i][j] != 0
        )
        scaled.append((sc, start, size))
    scaled.sort(key=lambda t: (t[0], t[1]))

    perm = []
    for sc, start, size in scaled:
        perm.extend(range(start, start + size))
    A2 = [[A[perm[i]][perm[j]] for j in range(r)] for i in range(r)]
    U2 = [U[perm[i]] for i in range(r)]

    modulus = ctx.modulus
    Umat = ModMatrix(ctx, [[_frac_mod(x, modulus) for x in row] for row in U2])

    blocks = []
    off = 0
    for sc, start, size in scaled:
        if blocks and blocks[-1][0] == sc:
            blocks[-1][1] += size
        else:
            blocks.append([sc, size])
        off += size

    max_scale = scaled[-1][0] if scaled else 0
    if ctx.N < max_scale + PRECISION_MARGIN:
        raise InsufficientPrecision(
            "need N >= %d for max scale %d" % (max_scale + PRECISION_MARGIN, max_scale)
        )

    jblocks = []
    off = 0
    for sc, size in blocks:
        sub = [
            [_frac_mod(A2[off + i][off + j] / Fraction(p ** sc), modulus) for j in range(size)]
            for i in range(size)
        ]
        gram = ModMatrix(ctx, sub)
        parity = None
        ovec = None
        if p == 2:
            parity = "odd" if any(gram[k, k] % 2 for k in range(size)) else "even"
            ovec = oddity_vector_of(gram) if parity == "odd" else tuple([0] * size)
        jblocks.append(JordanBlock(sc, size, gram, parity, ovec))
        off += size

    J = JordanDecomposition(ctx, jblocks, Umat, G)
    assert (Umat * G * Umat.transpose()) == J.assembled(), "reassembly failed"
    return J


def is_free(J: JordanDecomposition, i) -> bool:
    """True when the neighbors at scales i - 1 and i + 1 are even or absent."""
    if J.ctx.p != 2:
        return True
    return J.parity_at(i - 1) == 0 and J.parity_at(i + 1) == 0


def rho(J: JordanDecomposition, i) -> ElementaryForm:
    """The elementary form on the homogeneous quotient at scale i."""
    b = J.block_at(i)
    if b is None:
        raise ValueError("no block at scale %d" % i)
    p = J.ctx.p
    if p != 2:
        return ElementaryForm(p, "quadratic", b.gram.tolists())
    if is_free(J, i):
        return ElementaryForm(2, "quadratic", b.gram.tolists())
    return ElementaryForm(2, "bilinear", b.gram.tolists())
