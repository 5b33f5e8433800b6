import random

import pytest

from latdisc import hensel as hn
from latdisc import orders as od
from latdisc.padic_core import PadicContext, ModMatrix

from conftest import rand_gram


def _exact_isometry(rng, gram, p):
    """A signed block permutation preserving the assembled gram exactly."""
    r = len(gram)
    F = [[0] * r for _ in range(r)]
    i = 0
    while i < r:
        if i + 1 < r and gram[i][i + 1] != 0:
            # 2x2 unit block u or v: swap or identity, optionally negated
            s = rng.choice([1, -1])
            if rng.random() < 0.5:
                F[i][i + 1], F[i + 1][i] = s, s
            else:
                F[i][i], F[i + 1][i + 1] = s, s
            i += 2
        else:
            F[i][i] = rng.choice([1, -1])
            i += 1
    FG = [[sum(F[i][k] * gram[k][j] for k in range(r)) for j in range(r)] for i in range(r)]
    A = [[sum(FG[i][k] * F[j][k] for k in range(r)) for j in range(r)] for i in range(r)]
    if A != gram:
        # non-diagonal unit block: fall back to a global sign
        s = rng.choice([1, -1])
        F = [[s if i == j else 0 for j in range(r)] for i in range(r)]
    return F


def _perturbed_instance(rng, p, a):
    gram = rand_gram(rng, p, r_max=4, max_scale=2)
    J = od.decompose_over_Zp(gram, p, extra=14)
    ctx = J.ctx
    G = ModMatrix(ctx, gram)
    maxsc = J.max_scale()
    r = len(gram)
    F0 = _exact_isometry(rng, gram, p)
    noise = [[rng.randrange(-3, 4) * p ** (a + maxsc) for _ in range(r)] for _ in range(r)]
    F = ModMatrix(ctx, [[F0[i][j] + noise[i][j] for j in range(r)] for i in range(r)])
    return J, G, F


def test_level_of_identity_is_capped():
    J = od.decompose_over_Zp([[1, 0], [0, 4]], 2, extra=8)
    G = J.assembled()
    I = ModMatrix.identity(G.ctx, 2)
    lvl = hn.approximation_level(I, G, G)
    assert lvl == G.ctx.N - 2 - 3


def test_level_detects_incompatibility():
    J = od.decompose_over_Zp([[1, 0], [0, 9]], 3, extra=8)
    G = J.assembled()
    F = ModMatrix(G.ctx, [[1, 0], [1, 1]])  # lower entry not divisible by 9
    assert hn.approximation_level(F, G, G) == 0


def test_not_approximate_rejected():
    J = od.decompose_over_Zp([[1, 0], [0, 9]], 3, extra=8)
    G = J.assembled()
    F = ModMatrix(G.ctx, [[0, 1], [9, 0]])  # swaps scales, not an isometry
    with pytest.raises(hn.NotApproximate):
        hn.hensel_qf(F, G, G, 1, 3)


def test_odd_unimodular_square_root_style_lift():
    # x^2 = 1 has the lift 1 mod 3^k from 1 mod 3
    ctx = PadicContext(3, 10)
    G = ModMatrix(ctx, [[1]])
    F = ModMatrix(ctx, [[1 + 3 * 13]])
    out = hn.hensel_unimodular_odd(F, G, G, 1, 6)
    x = out.tolists()[0][0]
    assert (x * x - 1) % 3 ** 6 == 0


def test_even_unimodular_lift():
    ctx = PadicContext(2, 14)
    G = ModMatrix(ctx, [[2, 1], [1, 2]])
    F = ModMatrix(ctx, [[0, 1], [1, 0]])
    out = hn.hensel_unimodular_even(F, G, G, 2, 6)
    assert hn.approximation_level(out, G, G, [(0, 2)]) >= 6


def test_wrong_prime_dispatch():
    ctx = PadicContext(2, 8)
    G = ModMatrix(ctx, [[1]])
    with pytest.raises(ValueError):
        hn.hensel_unimodular_odd(ModMatrix(ctx, [[1]]), G, G, 1, 2)


def test_infer_blocks_rejects_non_jordan():
    ctx = PadicContext(2, 8)
    assert hn.infer_blocks(ModMatrix(ctx, [[2, 1], [1, 2]])) == [(0, 2)]
    with pytest.raises(ValueError):
        hn.infer_blocks(ModMatrix(ctx, [[1, 1], [1, 2]]))


def test_randomized_soundness_small(rng):
    for trial in range(40):
        p = rng.choice([2, 3, 5])
        a = rng.choice([1, 2])
        b = a + rng.choice([1, 2, 3])
        J, G, F = _perturbed_instance(rng, p, a)
        blocks = list(zip(J.scales, J.ranks))
        assert hn.approximation_level(F, G, G, blocks) >= a
        out = hn.hensel_qf(F, G, G, a, b, blocks)
        cap = G.ctx.N - J.max_scale() - 3
        assert hn.approximation_level(out, G, G, blocks) >= min(b, cap)
        # the change from F is graded like a compatible matrix at level a
        diff = (out - F).tolists()
        offs = hn._offsets(blocks)
        for bi, (i, _) in enumerate(blocks):
            for bj, (j, _) in enumerate(blocks):
                e = a + max(i - j, 0)
                for row in hn._block(diff, offs, bi, bj):
                    assert all(x % p ** e == 0 for x in row)
