import random

import pytest

from latdisc import orders as od


def rand_unimodular(rng: random.Random, r: int):
    """Random integer matrix of determinant +/-1 (products of shears and swaps)."""
    M = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    for _ in range(3 * r):
        i, j = rng.randrange(r), rng.randrange(r)
        if i == j:
            continue
        c = rng.choice([-2, -1, 1, 2])
        for k in range(r):
            M[i][k] += c * M[j][k]
    if rng.random() < 0.5:
        M.reverse()
    return M


def _rand_unit_block(rng: random.Random, p: int, r: int):
    """Symmetric r x r integer matrix with p-unit determinant."""
    if p == 2:
        pieces = []
        left = r
        while left > 0:
            if left >= 2 and rng.random() < 0.4:
                pieces.append(rng.choice([[[0, 1], [1, 0]], [[2, 1], [1, 2]]]))
                left -= 2
            else:
                pieces.append([[rng.choice([1, 3, 5, 7])]])
                left -= 1
        out = [[0] * r for _ in range(r)]
        at = 0
        for pc in pieces:
            for i, row in enumerate(pc):
                for j, x in enumerate(row):
                    out[at + i][at + j] = x
            at += len(pc)
        return out
    while True:
        out = [[rng.randrange(-4, 5) for _ in range(r)] for _ in range(r)]
        for i in range(r):
            for j in range(i):
                out[i][j] = out[j][i]
        if od._int_det(out) % p:
            return out


def rand_gram(rng: random.Random, p: int, r_max: int = 4, max_scale: int = 2):
    """Random Jordan-form gram at p: blockdiag(p^i * U_i), scales <= max_scale."""
    r = rng.randrange(1, r_max + 1)
    scales = sorted(rng.sample(range(max_scale + 1), rng.randrange(1, min(r, max_scale + 1) + 1)))
    ranks = [1] * len(scales)
    for _ in range(r - len(scales)):
        ranks[rng.randrange(len(ranks))] += 1
    out = [[0] * r for _ in range(r)]
    at = 0
    for s, rk in zip(scales, ranks):
        U = _rand_unit_block(rng, p, rk)
        for i in range(rk):
            for j in range(rk):
                out[at + i][at + j] = p ** s * U[i][j]
        at += rk
    return out


def conjugate(gram, X):
    r = len(gram)
    XG = [[sum(X[i][k] * gram[k][j] for k in range(r)) for j in range(r)] for i in range(r)]
    return [[sum(XG[i][k] * X[j][k] for k in range(r)) for j in range(r)] for i in range(r)]


@pytest.fixture
def rng():
    return random.Random(20260823)
