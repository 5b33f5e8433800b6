import itertools

import pytest

from latdisc import elementary_forms as ef


def all_quadratic_2(max_dim):
    """Every 2-elementary quadratic form up to isometry, dim <= max_dim."""
    out = []
    for dim in range(1, max_dim + 1):
        for u in range(dim // 2 + 1):
            for v in range(dim // 2 - u + 1):
                rest = dim - 2 * u - 2 * v
                for w1 in range(rest + 1):
                    w3 = rest - w1
                    tally = {"u": u, "v": v, "w1": w1, "w3": w3}
                    out.append(ef.from_tally(2, "quadratic", tally))
    return out


def all_bilinear_2(max_dim):
    out = []
    for dim in range(1, max_dim + 1):
        for ubar in range(dim // 2 + 1):
            wbar = dim - 2 * ubar
            if wbar in (0, 1, 2):
                out.append(ef.from_tally(2, "bilinear", {"ubar": ubar, "wbar": wbar}))
    return out


def all_quadratic_odd(p, max_dim):
    out = []
    nonsq = next(a for a in range(2, p) if not ef.is_square_mod(a, p))
    for dim in range(1, max_dim + 1):
        for lead in (1, nonsq):
            gram = [[0] * dim for _ in range(dim)]
            for k in range(dim):
                gram[k][k] = 1
            gram[0][0] = lead
            out.append(ef.ElementaryForm(p, "quadratic", gram))
    return out


def test_standard_block_orders():
    assert ef.order_O(ef.form_u()) == 2
    assert ef.order_O(ef.form_v()) == 6
    assert ef.order_O(ef.form_ubar()) == 6  # Sp_2(F_2)
    assert ef.order_O(ef.form_wbar()) == 1
    assert ef.count_zeros(ef.form_u()) == 3
    assert ef.count_zeros(ef.form_v()) == 1


def test_order_matches_enumeration_2elementary():
    for form in all_quadratic_2(4) + all_bilinear_2(4):
        assert ef.order_O(form) == len(ef.enumerate_O(form)), form


def test_order_matches_enumeration_odd():
    for p in (3, 5):
        for form in all_quadratic_odd(p, 3):
            assert ef.order_O(form) == len(ef.enumerate_O(form)), form


def test_count_zeros_matches_enumeration():
    for form in all_quadratic_2(4):
        brute = sum(
            1
            for x in itertools.product(range(2), repeat=form.dim)
            if form.q_value(x) == 0
        )
        assert ef.count_zeros(form) == brute, form


def test_classify_roundtrip():
    for form in all_quadratic_2(4):
        tally = ef.classify(form)
        rebuilt = ef.from_tally(2, "quadratic", tally)
        assert ef.classify(rebuilt) == tally
        assert ef.order_O(rebuilt) == ef.order_O(form)


def test_generators_close_to_full_group():
    for form in all_quadratic_2(3) + all_bilinear_2(3):
        gens = ef.generators_O(form)
        closed = ef._close([g.matrix for g in gens], 2)
        assert len(closed) == ef.order_O(form), form


def test_transvection_reflection_are_isometries():
    form = ef.form_v()
    bform = ef.ElementaryForm(2, "bilinear", form.bilinear_gram())
    t = ef.transvection(form, (1, 0))
    assert t.matrix in {f.matrix for f in ef.enumerate_O(bform)}
    r = ef.reflection(form, (1, 0))
    assert r in ef.enumerate_O(form)


def test_too_large_guard():
    big = ef.from_tally(2, "quadratic", {"u": 4, "v": 0, "w1": 1, "w3": 0})
    with pytest.raises(ef.TooLarge):
        ef.enumerate_O(big, bound=16)
