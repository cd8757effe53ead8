import itertools
import random

import pytest

from wmds.errors import EnumerationLimitError, UnsupportedFieldError
from wmds.exact_algebra import QSqrtNumber
from wmds.global_mds import (
    MonicPoly,
    coefficient_sum,
    h_coefficient,
    h_coefficient_sequential,
    h_prime,
    monics,
    p_part_coefficient,
    residue_symbol,
    residue_symbol_euler,
    square_condition,
)
from wmds.root_system import build_root_system

Q = 5


def P(*coeffs, q=Q):
    return MonicPoly.from_coeffs(q, coeffs)


def test_symbols_by_hand():
    t = P(1, 0)
    # (t+2 / t) = (2 / 5) = -1; (t / t+1) = (-1 / 5) = 1
    assert residue_symbol(P(1, 2), t) == -1
    assert residue_symbol(t, P(1, 1)) == 1
    assert residue_symbol(t, t) == 0
    assert residue_symbol(t, P(1)) == 1


def test_euler_and_reciprocity_paths_agree_degree_two():
    polys = [m for d in range(3) for m in monics(Q, d)]
    for a, b in itertools.product(polys, polys):
        assert residue_symbol(a, b) == residue_symbol_euler(a, b)


@pytest.mark.parametrize("q", [2, 3, 7, 9, 25])
def test_unsupported_fields(q):
    with pytest.raises(UnsupportedFieldError):
        residue_symbol(MonicPoly.one(q), MonicPoly.one(q))


def test_factorization_round_trip():
    m = P(1, 2) ** 2 * P(1, 0, 2) * P(1, 4)
    out = MonicPoly.one(Q)
    for p, e in m.factor():
        assert p.is_irreducible()
        out = out * p**e
    assert out == m


def test_rank_one_p_parts():
    # Z = 1/(1 - u x): H(p^k) = |p|^{-k/2}
    a1 = build_root_system("A1")
    p = P(1, 1, 2)  # irreducible quadratic over F_5
    assert p.is_irreducible()
    for k in range(4):
        assert p_part_coefficient(a1, p, (k,)) * QSqrtNumber.rational(Q**k, Q) == QSqrtNumber.rational(1, Q)


def test_rank_one_cells():
    a1 = build_root_system("A1")
    for d in range(4):
        s = coefficient_sum(a1, Q, (d,))
        assert s * s == QSqrtNumber.rational(Q**d, Q)


def test_factor_order_does_not_matter():
    rng = random.Random(1)
    for label in ("A2", "A3"):
        rs = build_root_system(label)
        for _ in range(20):
            ms = [MonicPoly(Q, (1,) + tuple(rng.randrange(Q) for _ in range(rng.randint(0, 3)))) for _ in range(rs.rank)]
            base = h_coefficient(rs, ms).value
            nblocks = len({p for m in ms for p, _ in m.factor()})
            for order in itertools.islice(itertools.permutations(range(nblocks)), 6):
                assert h_coefficient_sequential(rs, ms, order) == base


def test_threads_give_the_same_sum():
    a2 = build_root_system("A2")
    assert coefficient_sum(a2, Q, (2, 1), threads=1) == coefficient_sum(a2, Q, (2, 1), threads=4)


def test_cap():
    with pytest.raises(EnumerationLimitError):
        coefficient_sum(build_root_system("A2"), Q, (3, 3), cap=1000)


def test_h_prime_trivial_tuple():
    a3 = build_root_system("A3")
    one = MonicPoly.one(Q)
    assert h_prime(a3, 1, [one] * 3) == QSqrtNumber.rational(1, Q)


def test_square_condition():
    a3 = build_root_system("A3")
    p, one = P(1, 1), MonicPoly.one(Q)
    assert square_condition(a3, 1, [p, one, p])
    assert not square_condition(a3, 1, [p, one, one])
