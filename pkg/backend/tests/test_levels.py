"""
Tests for parabolic levels, Levi structures, label constraints and central pairings
"""

import random
from itertools import combinations_with_replacement

import pytest

from app.exceptions import ContractError, CorruptedCharacterError, ParseError
from app.services.characters import Character, freudenthal_multiplicity, weyl_character
from app.services.levels import (
    LeviSubset,
    central_pairing,
    ford_constraints,
    format_levels_tsv,
    level_decomposition,
    level_factor_count,
    level_induction_bound,
    level_of_lowest,
    level_reducible,
    levi_structure,
    shapes,
)
from app.services.rootcore import fundamental_weight

A5_DELTA3 = (0, 0, 1, 0, 0)
A3_2DELTA2 = (0, 2, 0)


def _levels(r, delta, subset=None):
    subset = subset or LeviSubset.borel(r.rank)
    return level_decomposition(r, delta, subset, weyl_character(r, delta))


@pytest.mark.unit
class TestLeviSubset:
    """Parsing and validation of Levi node subsets"""

    def test_parse_borel(self):
        subset = LeviSubset.parse("borel", 5)
        assert subset.is_borel
        assert subset.complement == (1, 2, 3, 4, 5)

    def test_parse_nodes(self):
        subset = LeviSubset.parse("4,2,3", 5)
        assert subset.nodes == (2, 3, 4)
        assert subset.complement == (1, 5)

    def test_parse_garbage(self):
        with pytest.raises(ParseError):
            LeviSubset.parse("2,x", 5)

    def test_full_set_is_not_parabolic(self):
        with pytest.raises(ContractError):
            LeviSubset.of(3, [1, 2, 3])

    def test_out_of_range(self):
        with pytest.raises(ContractError):
            LeviSubset.of(3, [0, 2])


@pytest.mark.unit
class TestLevelDecomposition:
    """Level dimensions, shapes and the lowest level"""

    def test_a3_symmetric_square_borel(self, rs, read_tsv):
        pl = _levels(rs("A3"), A3_2DELTA2)
        expected = [int(row["dim"]) for row in read_tsv("levels_A3_020_borel.tsv")]
        assert pl.ell == 8
        assert pl.dims() == expected
        assert sum(pl.dims()) == 20

    def test_e6_adjoint_top_levels(self, rs):
        pl = _levels(rs("E6"), (0, 1, 0, 0, 0, 0))
        assert pl.ell == 22
        assert pl.dims()[:4] == [1, 1, 1, 2]
        assert pl.levels[pl.half].dim == 6

    def test_a5_middle_weight_with_levi(self, rs):
        r = rs("A5")
        pl = _levels(r, A5_DELTA3, LeviSubset.of(5, [2, 3, 4]))
        assert pl.ell == 2
        assert pl.dims() == [6, 8, 6]
        assert shapes(pl, 1) == frozenset({(1, 0), (0, 1)})
        assert level_reducible(pl, 1)
        assert not level_reducible(pl, 0)

    def test_level_factor_count(self, rs):
        r = rs("A5")
        pl = _levels(r, A5_DELTA3, LeviSubset.of(5, [2, 3, 4]))
        assert level_factor_count(r, pl, 1).kappa == 2
        assert level_factor_count(r, pl, 0).kappa == 1

    def test_shapes_out_of_range(self, rs):
        pl = _levels(rs("A2"), (1, 0))
        with pytest.raises(ContractError):
            shapes(pl, pl.ell + 1)

    @pytest.mark.parametrize(
        "text,delta,ell",
        [
            ("A5", A5_DELTA3, 9),
            ("D4", (0, 1, 0, 0), 10),
            ("D5", (0, 1, 0, 0, 0), 14),
            ("D7", (0, 1, 0, 0, 0, 0, 0), 22),
            ("A3", A3_2DELTA2, 8),
        ],
    )
    def test_level_of_lowest(self, rs, text, delta, ell):
        r = rs(text)
        assert level_of_lowest(r, delta, LeviSubset.borel(r.rank)) == ell
        assert _levels(r, delta).ell == ell

    def test_weight_not_under_delta(self, rs):
        with pytest.raises(CorruptedCharacterError):
            level_decomposition(
                rs("A1"), (1,), LeviSubset.borel(1), Character("A1", {(3,): 1})
            )


@pytest.mark.unit
class TestLeviStructure:
    """Levi factors of the induced parabolic in the ambient group"""

    def test_a3_symmetric_square(self, rs):
        ls = levi_structure(rs("A3"), _levels(rs("A3"), A3_2DELTA2), "symmetric")
        assert ls.ambient_rank == 10
        assert [(f.level, f.tag, f.nodes) for f in ls.factors] == [
            (2, "A2", (3, 4)),
            (3, "A2", (6, 7)),
            (4, "A1", (9,)),
            (4, "A1", (10,)),
        ]
        assert ls.a1_positions == [9, 10]

    def test_a5_middle_weight(self, rs):
        ls = levi_structure(rs("A5"), _levels(rs("A5"), A5_DELTA3), "skew")
        assert ls.ambient_rank == 10
        assert [(f.tag, f.nodes) for f in ls.factors] == [
            ("A1", (3,)),
            ("A2", (5, 6)),
            ("A2", (8, 9)),
        ]
        assert ls.levi_nodes == [3, 5, 6, 8, 9]

    def test_symmetric_middle_of_dimension_six_is_a3(self, rs):
        # E6 adjoint: the zero weight space sits at level 11 with dimension 6
        r = rs("E6")
        ls = levi_structure(r, _levels(r, (0, 1, 0, 0, 0, 0)), "symmetric")
        assert ls.ambient_rank == 39
        last = ls.factors[-1]
        assert (last.level, last.tag, last.nodes) == (11, "A3", (38, 37, 39))
        assert all(f.kind != "D" for f in ls.factors)
        report = ford_constraints(ls, ".S3")
        exterior = [
            p
            for p in report.allowed_patterns
            if p.case == "A3 factor, exterior square"
        ]
        assert len(exterior) == 2
        assert any(p.assignment[37] == 1 for p in exterior)

    def test_skew_middle_level(self, rs):
        # V(3) of A1 is 4-dimensional and symplectic
        r = rs("A1")
        ls = levi_structure(r, _levels(r, (3,)), "skew")
        assert ls.factors == []

    def test_not_self_dual(self, rs):
        r = rs("A5")
        with pytest.raises(ContractError):
            levi_structure(r, _levels(r, (1, 0, 0, 0, 0)), "symmetric")

    def test_unknown_form(self, rs):
        r = rs("A3")
        with pytest.raises(ContractError):
            levi_structure(r, _levels(r, A3_2DELTA2), "hermitian")

    def test_levels_tsv(self, rs):
        r = rs("A3")
        pl = _levels(r, A3_2DELTA2)
        lines = format_levels_tsv(pl, levi_structure(r, pl, "symmetric")).splitlines()
        assert lines[0] == "level\tdim\tdistinct\tshapes\tfactor"
        assert lines[1] == "0\t1\t1\t(0,0,0)\t-"
        assert lines[3].split("\t")[4] == "A2"
        assert lines[5].split("\t")[:3] == ["4", "4", "3"]
        assert lines[5].split("\t")[4] == "A1+A1"
        assert len(lines) == 10


@pytest.mark.unit
class TestConstraints:
    """Allowed label patterns on the Levi nodes"""

    def test_order_two_on_a5(self, rs):
        r = rs("A5")
        ls = levi_structure(r, _levels(r, A5_DELTA3), "skew")
        report = ford_constraints(ls, ".2")
        assert len(report.allowed_patterns) == 1
        assert report.allowed_patterns[0].assignment == {3: 1, 5: 0, 6: 0, 8: 0, 9: 0}

    def test_order_three_on_a5(self, rs):
        r = rs("A5")
        ls = levi_structure(r, _levels(r, A5_DELTA3), "skew")
        report = ford_constraints(ls, ".3")
        assignments = [p.assignment for p in report.allowed_patterns]
        assert len(assignments) == 5
        assert {3: 2, 5: 0, 6: 0, 8: 0, 9: 0} in assignments
        assert {3: 0, 5: 0, 6: 1, 8: 0, 9: 0} in assignments

    def test_order_two_on_a3(self, rs):
        r = rs("A3")
        ls = levi_structure(r, _levels(r, A3_2DELTA2), "symmetric")
        report = ford_constraints(ls, ".2")
        assignments = [p.assignment for p in report.allowed_patterns]
        assert assignments == [
            {3: 0, 4: 0, 6: 0, 7: 0, 9: 1, 10: 0},
            {3: 0, 4: 0, 6: 0, 7: 0, 9: 0, 10: 1},
        ]

    def test_symmetric_group_patterns_carry_conditions(self, rs):
        r = rs("A3")
        ls = levi_structure(r, _levels(r, A3_2DELTA2), "symmetric")
        report = ford_constraints(ls, ".S3")
        assert not report.is_empty
        conditions = {p.condition for p in report.allowed_patterns}
        assert conditions >= {"p != 2", "p not in {2,3,5}"}

    def test_no_a1_means_nothing_allowed(self, rs):
        r = rs("A1")
        ls = levi_structure(r, _levels(r, (3,)), "skew")
        assert ford_constraints(ls, ".2").is_empty

    def test_unknown_extension(self, rs):
        r = rs("A5")
        ls = levi_structure(r, _levels(r, A5_DELTA3), "skew")
        with pytest.raises(ContractError):
            ford_constraints(ls, ".4")


@pytest.mark.unit
class TestCentralPairing:
    """Central cocharacters of the complement nodes"""

    def test_type_a(self, rs):
        subset = LeviSubset.of(3, [1, 2])
        assert central_pairing(rs("A3"), subset, (1, 1, 1)) == [1 + 2 + 3]
        assert central_pairing(rs("A3"), subset, (0, 0, 2)) == [6]

    def test_type_d(self, rs):
        # 2 * sum(i * c_i) + (m - 2) * c_{m-1} + m * c_m at the last node of D_m
        subset = LeviSubset.of(5, [1, 2, 3, 4])
        r = rs("D5")
        assert central_pairing(r, subset, (1, 0, 0, 0, 0)) == [2]
        assert central_pairing(r, subset, (0, 0, 0, 1, 0)) == [3]
        assert central_pairing(r, subset, (0, 0, 0, 0, 1)) == [5]
        assert central_pairing(r, subset, (1, 1, 0, 1, 1)) == [2 + 4 + 3 + 5]

    def test_e6_node_three(self, rs):
        r = rs("E6")
        subset = LeviSubset.of(6, [1, 2, 4, 5, 6])
        assert central_pairing(r, subset, (0, 0, 1, 0, 0, 0)) == [10]
        assert central_pairing(r, subset, (1, 2, 3, 4, 5, 6)) == [
            5 + 12 + 30 + 48 + 40 + 24
        ]

    def test_e6_borel_is_minimal_at_each_node(self, rs):
        pairing = central_pairing(rs("E6"), LeviSubset.borel(6), (0, 0, 1, 0, 0, 0))
        assert pairing == [5, 2, 10, 4, 8, 4]

    @pytest.mark.parametrize(
        "text,levi,mu,expected",
        [
            ("D5", [2, 3, 4, 5], (0, 0, 0, 0, 1), [1]),
            ("E6", [1, 3, 4, 5, 6], (0, 1, 0, 0, 0, 0), [2]),
            ("A3", [1, 3], (0, 1, 0), [2]),
        ],
    )
    def test_smallest_integral_multiple(self, rs, text, levi, mu, expected):
        r = rs(text)
        assert central_pairing(r, LeviSubset.of(r.rank, levi), mu) == expected

    @pytest.mark.parametrize("m", range(2, 10))
    def test_type_a_general(self, rs, m):
        rng = random.Random(m)
        r = rs(f"A{m}")
        subset = LeviSubset.of(m, list(range(1, m)))
        for _ in range(10):
            c = [rng.randint(0, 4) for _ in range(m)]
            expected = sum(j * cj for j, cj in enumerate(c, start=1))
            assert central_pairing(r, subset, c) == [expected]

    @pytest.mark.parametrize("m", range(4, 10))
    def test_type_d_general(self, rs, m):
        rng = random.Random(m)
        r = rs(f"D{m}")
        subset = LeviSubset.of(m, list(range(1, m)))
        for _ in range(10):
            c = [rng.randint(0, 4) for _ in range(m)]
            full = (
                2 * sum(i * c[i - 1] for i in range(1, m - 1))
                + (m - 2) * c[m - 2]
                + m * c[m - 1]
            )
            # the centre of D_m is cyclic of order 4 only for odd m
            expected = full if m % 2 else full // 2
            assert central_pairing(r, subset, c) == [expected]

    def test_e6_general(self, rs):
        rng = random.Random(6)
        r = rs("E6")
        subset = LeviSubset.of(6, [1, 2, 4, 5, 6])
        weights = (5, 6, 10, 12, 8, 4)
        for _ in range(20):
            c = [rng.randint(0, 4) for _ in range(6)]
            expected = sum(w * x for w, x in zip(weights, c))
            assert central_pairing(r, subset, c) == [expected]

    def test_root_pairs_to_zero_off_support(self, rs):
        r = rs("A5")
        alpha3 = r.root_to_weight((0, 0, 1, 0, 0))
        assert central_pairing(r, LeviSubset.of(5, [2, 3, 4]), alpha3) == [0, 0]


@pytest.mark.unit
class TestInductionBound:
    """Distinct weights propagate from a subdominant weight"""

    def test_a3(self, rs):
        assert level_induction_bound(rs("A3"), A3_2DELTA2, (1, 0, 1), a=1, r=2)

    def test_d5(self, rs):
        assert level_induction_bound(
            rs("D5"), (2, 0, 0, 0, 0), (0, 1, 0, 0, 0), a=4, r=3
        )

    def test_not_subdominant(self, rs):
        with pytest.raises(ContractError):
            level_induction_bound(rs("A3"), (1, 0, 1), A3_2DELTA2, a=1, r=2)


def _level_dim(r, delta, j):
    """Dimension of the Borel level j from Freudenthal multiplicities alone"""
    total = 0
    for nodes in combinations_with_replacement(range(r.rank), j):
        mu = list(delta)
        for i in nodes:
            mu = [x - a for x, a in zip(mu, r.cartan[i])]
        total += freudenthal_multiplicity(r, delta, mu)
    return total


def _pair(m, i, a=1):
    delta = [0] * m
    delta[i - 1] += a
    delta[m - i] += a if m + 1 - i != i else 0
    return tuple(delta)


def _type_a_cases():
    for m in range(4, 9):
        yield m, _pair(m, 2), 2, None
        yield m, _pair(m, 1, 2), 2, None
        if m % 2:
            yield m, _pair(m, (m + 1) // 2), 1, 2
    yield 4, (1, 1, 1, 1), 4, None


@pytest.mark.unit
class TestTypeALevels:
    """Level dimensions of A_m modules other than the adjoint"""

    @pytest.mark.parametrize("m,delta,w1,w2", list(_type_a_cases()))
    def test_level_dimensions(self, rs, m, delta, w1, w2):
        r = rs(f"A{m}")
        pl = _levels(r, delta)
        dims = pl.dims()
        assert dims[0] == 1
        assert dims[1] == w1 == sum(1 for c in delta if c)
        if w2 is None:
            assert dims[2] >= 3
        else:
            assert dims[2] == w2
        for j in range(3, pl.half + 1):
            assert dims[j] >= 3
        if pl.ell % 2 == 0:
            assert dims[pl.half] >= 5

    @pytest.mark.parametrize("m", range(4, 9))
    def test_second_and_second_last(self, rs, m):
        r = rs(f"A{m}")
        assert level_of_lowest(r, _pair(m, 2), LeviSubset.borel(m)) == 4 * m - 4

    def test_a8_second_and_seventh_dimension(self, rs):
        assert sum(_levels(rs("A8"), _pair(8, 2)).dims()) == 1215


@pytest.mark.unit
class TestTypeDLevels:
    """Level dimensions of D_m modules"""

    @pytest.mark.parametrize("m", [5, 6, 7])
    def test_adjoint(self, rs, m):
        r = rs(f"D{m}")
        pl = _levels(r, fundamental_weight(m, 2))
        assert pl.ell == 4 * m - 6
        assert pl.levels[pl.half].dim == m

    @pytest.mark.parametrize("m", range(4, 9))
    def test_level_of_lowest_fundamental(self, rs, m):
        r = rs(f"D{m}")
        for i in range(1, m - 1):
            low = level_of_lowest(r, fundamental_weight(m, i), LeviSubset.borel(m))
            assert low == i * (2 * m - i - 1)

    @pytest.mark.parametrize("m", [5, 6])
    def test_equal_spin_labels(self, rs, m):
        r = rs(f"D{m}")
        delta = [0] * m
        delta[m - 2] = delta[m - 1] = 2
        assert _level_dim(r, delta, 1) == 2
        assert _level_dim(r, delta, 2) >= 3

    @pytest.mark.parametrize("m,b", [(5, 3), (6, 3), (7, 4)])
    def test_multiple_of_first(self, rs, m, b):
        r = rs(f"D{m}")
        delta = fundamental_weight(m, 1, b)
        assert _level_dim(r, delta, 1) == 1
        assert _level_dim(r, delta, 2) == 2


def _e6(a=0, b=0, c=0, d=0):
    return (a, b, c, d, c, a)


@pytest.mark.unit
class TestE6Levels:
    """Level of the lowest weight and the first three levels for E6"""

    @pytest.mark.parametrize(
        "a,b,c,d",
        [
            (a, b, c, d)
            for a in (0, 1, 2)
            for b in (0, 1)
            for c in (0, 1)
            for d in (0, 1, 2)
        ],
    )
    def test_level_of_lowest(self, rs, a, b, c, d):
        r = rs("E6")
        ell = level_of_lowest(r, _e6(a, b, c, d), LeviSubset.borel(6))
        assert ell == 2 * (16 * a + 11 * b + 30 * c + 21 * d)

    @pytest.mark.parametrize(
        "delta,expected",
        [
            (_e6(b=1), (1, 1, 2)),
            (_e6(b=2), (1, 2, None)),
            (_e6(d=1), (1, None, None)),
            (_e6(a=1), (2, None, None)),
            (_e6(c=1), (2, None, None)),
            pytest.param(_e6(b=1, d=1), (2, None, None), marks=pytest.mark.slow),
            pytest.param((1, 1, 0, 0, 0, 1), (3, None, None), marks=pytest.mark.slow),
        ],
    )
    def test_first_levels(self, rs, delta, expected):
        r = rs("E6")
        for j, want in enumerate(expected, start=1):
            got = _level_dim(r, delta, j)
            if want is None:
                assert got >= 3
            else:
                assert got == want

    def test_first_and_sixth(self, rs):
        assert _levels(rs("E6"), _e6(a=1)).ell == 32


def _d4_grid():
    for a in range(3):
        for b in range(3):
            for c in range(3):
                marks = [pytest.mark.slow] if a + b + c > 3 else []
                yield pytest.param(a, b, c, marks=marks)


@pytest.mark.unit
class TestD4Levels:
    """D4 modules with equal spin labels"""

    @pytest.mark.parametrize("a,b,c", list(_d4_grid()))
    def test_grid(self, rs, a, b, c):
        r = rs("D4")
        delta = (a, b, c, c)
        assert level_of_lowest(r, delta, LeviSubset.borel(4)) == 6 * a + 10 * b + 12 * c
        assert _level_dim(r, delta, 0) == 1
        assert _level_dim(r, delta, 1) == 4 - (a == 0) - (b == 0) - 2 * (c == 0)

    def test_adjoint(self, rs):
        pl = _levels(rs("D4"), (0, 1, 0, 0))
        assert pl.ell == 10
        assert pl.dims()[2:6] == [3, 3, 4, 4]
