import pytest

from latdisc.padic_core import (
    PadicContext,
    ModMatrix,
    NotAUnit,
    PrecisionMismatch,
    block_diag,
    block_view,
    valuation,
)


def test_context_validation():
    with pytest.raises(ValueError):
        PadicContext(4, 5)
    with pytest.raises(ValueError):
        PadicContext(3, 0)
    ctx = PadicContext(3, 4)
    assert ctx.modulus == 81


def test_valuation():
    ctx = PadicContext(3, 6)
    assert valuation(18, ctx) == 2
    assert valuation(1, ctx) == 0
    assert valuation(0, ctx) >= ctx.N or valuation(0, ctx) == float("inf")


def test_arithmetic_and_reduction():
    ctx = PadicContext(5, 3)
    A = ModMatrix(ctx, [[1, 2], [3, 4]])
    B = ModMatrix(ctx, [[126, 2], [3, -121]])
    assert A == B  # entries agree mod 125
    assert (A + B - A) == B
    assert (A * ModMatrix.identity(ctx, 2)) == A
    assert A.transpose().transpose() == A


def test_mixed_context_rejected():
    A = ModMatrix(PadicContext(5, 3), [[1]])
    B = ModMatrix(PadicContext(5, 4), [[1]])
    with pytest.raises(PrecisionMismatch):
        _ = A + B


def test_unit_inverse_roundtrip():
    ctx = PadicContext(2, 8)
    A = ModMatrix(ctx, [[1, 2], [3, 7]])
    assert A * A.unit_inverse() == ModMatrix.identity(ctx, 2)
    singular = ModMatrix(ctx, [[2, 0], [0, 1]])
    with pytest.raises(NotAUnit):
        singular.unit_inverse()


def test_exact_div_and_congruence():
    ctx = PadicContext(3, 5)
    A = ModMatrix(ctx, [[9, 18], [27, 9]])
    half = A.exact_div(2)
    assert half.tolists() == [[1, 2], [3, 1]]
    assert A.congruent_mod(ModMatrix.zeros(ctx, 2, 2), 2)
    assert not A.congruent_mod(ModMatrix.zeros(ctx, 2, 2), 3)


def test_block_helpers():
    ctx = PadicContext(3, 4)
    D = block_diag(ctx, [ModMatrix(ctx, [[1]]), ModMatrix(ctx, [[2, 0], [0, 2]])])
    assert D.tolists() == [[1, 0, 0], [0, 2, 0], [0, 0, 2]]
    view = block_view(D, [1, 2])
    assert view.block(0, 0).tolists() == [[1]]
    assert view.block(1, 1).tolists() == [[2, 0], [0, 2]]
    assert view.block(0, 1).tolists() == [[0, 0]]
