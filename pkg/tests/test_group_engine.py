import pytest

from latdisc import generators as gn
from latdisc import group_engine as ge
from latdisc import orders as od
from latdisc.padic_core import PadicContext, ModMatrix


def test_identity_closure():
    ctx = PadicContext(3, 2)
    assert ge.closure_order([ModMatrix.identity(ctx, 2)]) == 1
    assert ge.closure_order([]) == 1


def test_cyclic_generator_order():
    ctx = PadicContext(5, 2)
    g = ModMatrix(ctx, [[7]])  # multiplicative order of 7 mod 25 is 4
    assert ge.closure_order([g]) == 4
    assert ge.orbit_stabilizer_order([g]) == 4


def test_budget_exceeded():
    ctx = PadicContext(5, 3)
    g = ModMatrix(ctx, [[2]])
    with pytest.raises(ge.BudgetExceeded):
        ge.closure_order([g], budget=3)


def test_enumeration_examples():
    count, mats = ge.enumerate_isometries_mod(ModMatrix(PadicContext(2, 8), [[1]]), 2)
    assert count == 2
    assert sorted(M.tolists()[0][0] for M in mats) == [1, 3]
    count, _ = ge.enumerate_isometries_mod(
        ModMatrix(PadicContext(2, 8), [[2, 1], [1, 2]]), 1
    )
    assert count == 6


def test_enumeration_matches_formula():
    cases = [
        ([[1, 0], [0, 2]], 2, 1),
        ([[1, 0], [0, 2]], 2, 2),
        ([[1, 0], [0, 3]], 3, 1),
        ([[2, 0], [0, 3]], 3, 1),
        ([[1, 0], [0, 4]], 2, 2),
        ([[3]], 3, 2),
    ]
    for gram, p, n in cases:
        J = od.decompose_over_Zp(gram, p, extra=n + 4)
        count, _ = ge.enumerate_isometries_mod(
            ModMatrix(PadicContext(p, n + 6), gram), n
        )
        assert count == od.order_mod_pn(J, n).total, (gram, p, n)


def test_enumeration_too_large():
    with pytest.raises(ge.TooLarge):
        ge.enumerate_isometries_mod(
            ModMatrix(PadicContext(2, 10), [[1, 0, 0], [0, 1, 0], [0, 0, 1]]), 3
        )


def test_closure_and_orbit_stabilizer_agree():
    for gram, p, n in [
        ([[3, 0, 0], [0, 9, 0], [0, 0, 9]], 3, 2),
        ([[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 4]], 2, 2),
        ([[1, 0], [0, 2]], 2, 2),
    ]:
        J = od.decompose_over_Zp(gram, p, extra=8)
        gs = gn.generators_mod_pn(J, n)
        assert ge.closure_order(gs.matrices) == ge.orbit_stabilizer_order(gs.matrices)
