"""Contact counting operations: affine, constrained, sampled, projective."""

import pytest

from arcdet import IdealGens, QQ, SeriesMatrix, parse_poly
from arcdet.consensus import STATUS_EXACT_EMPTY, STATUS_SAMPLED
from arcdet.contact import (
    MODE_AT_LEAST,
    MODE_EXACT,
    ContactQuery,
    count_contact,
    proj_count_contact,
)
from arcdet.errors import ValidationError
from arcdet.jets import jet_space_size


def single_var_ideal():
    return IdealGens((parse_poly("x1", ["x1"]),))


def det_ideal():
    vs = ["x1", "x2", "x3", "x4"]
    return IdealGens((parse_poly("x1*x4 - x2*x3", vs),))


class TestQueries:
    def test_m_bounded_by_level(self):
        with pytest.raises(ValidationError):
            ContactQuery(MODE_EXACT, 3, 2)

    def test_unknown_mode(self):
        with pytest.raises(ValidationError):
            ContactQuery("sometimes", 1, 2)

    def test_unknown_constraint(self):
        with pytest.raises(ValidationError):
            ContactQuery(MODE_EXACT, 1, 2, constraint="nope")


class TestCountContact:
    def test_linear_conditions(self):
        rep = count_contact(single_var_ideal(), ContactQuery(MODE_AT_LEAST, 2, 2, primes=(3, 5)))
        counts = dict((q, raw) for q, raw, _ in rep.counts)
        assert counts[3] == 3 and counts[5] == 5
        assert rep.consensus_codim == 2

    def test_exact_mode(self):
        rep = count_contact(single_var_ideal(), ContactQuery(MODE_EXACT, 1, 2, primes=(3, 5)))
        counts = dict((q, raw) for q, raw, _ in rep.counts)
        assert counts[3] == 6  # a0 = 0, a1 != 0, a2 free
        assert counts[5] == 20

    def test_rank_locus(self):
        rep = count_contact(det_ideal(), ContactQuery(MODE_AT_LEAST, 1, 1, primes=(2, 3)))
        counts = dict((q, raw) for q, raw, _ in rep.counts)
        # level 1 multiplies the level-0 count by q^4
        assert counts[2] == 10 * 16 and counts[3] == 33 * 81

    def test_partition_of_counts(self):
        gens = det_ideal()
        level, q = 2, 2
        total = jet_space_size(4, level, q)
        pieces = 0
        for m in range(level + 1):
            rep = count_contact(gens, ContactQuery(MODE_EXACT, m, level, primes=(q, 3)))
            pieces += dict((p, raw) for p, raw, _ in rep.counts)[q]
        bot = dict(rep.sentinel_counts)[q]
        assert pieces + bot == total

    def test_monotonicity_and_decomposition(self):
        gens = det_ideal()
        level, q = 2, 3
        at_least = {}
        exact = {}
        for m in range(level + 1):
            r1 = count_contact(gens, ContactQuery(MODE_AT_LEAST, m, level, primes=(2, q)))
            r2 = count_contact(gens, ContactQuery(MODE_EXACT, m, level, primes=(2, q)))
            at_least[m] = dict((p, raw) for p, raw, _ in r1.counts)[q]
            exact[m] = dict((p, raw) for p, raw, _ in r2.counts)[q]
            bot = dict(r2.sentinel_counts)[q]
        for m in range(level):
            assert at_least[m + 1] <= at_least[m]
            assert at_least[m] == sum(exact[k] for k in range(m, level + 1)) + bot

    def test_coordinate_invariance(self):
        # precompose with the invertible substitution x1 -> x1 + x2, x2 -> x2
        vs = ["x1", "x2"]
        f = parse_poly("x1*x2", vs)
        g = parse_poly("(x1 + x2)*x2", vs)
        for m, mode in [(1, MODE_AT_LEAST), (2, MODE_EXACT)]:
            r1 = count_contact(IdealGens((f,)), ContactQuery(mode, m, 2, primes=(2, 3)))
            r2 = count_contact(IdealGens((g,)), ContactQuery(mode, m, 2, primes=(2, 3)))
            assert [(q, raw) for q, raw, _ in r1.counts] == [(q, raw) for q, raw, _ in r2.counts]

    def test_constraint_registry(self):
        gens = single_var_ideal()
        rep = count_contact(gens, ContactQuery(MODE_AT_LEAST, 1, 1, primes=(3, 5), constraint="origin_based"))
        counts = dict((q, raw) for q, raw, _ in rep.counts)
        assert counts[3] == 3  # a0 = 0 forced by both the constraint and the condition

    def test_sampled_mode(self):
        # x1^2 defeats every exact split, so a tiny budget forces sampling
        gens = IdealGens((parse_poly("x1^2", ["x1", "x2"]),))
        rep = count_contact(
            gens,
            ContactQuery(MODE_AT_LEAST, 1, 4, primes=(5,)),
            budget=1000,
            samples=2000,
            seed=1,
        )
        assert rep.status == STATUS_SAMPLED
        assert "wilson" in rep.detail

    def test_single_prime_report_is_ambiguous(self):
        rep = count_contact(single_var_ideal(), ContactQuery(MODE_AT_LEAST, 1, 2, primes=(3,)))
        assert rep.status == "AMBIGUOUS"
        assert dict((q, raw) for q, raw, _ in rep.counts)[3] == 9


class TestProjective:
    def test_fiber_over_diag_base(self):
        base = SeriesMatrix.diagonal_powers(QQ, 2, 2, (0, 2))
        rep = proj_count_contact(None, 2, ContactQuery(MODE_AT_LEAST, 1, 2, primes=(2, 3)), fixed_base=base)
        assert rep.consensus_codim == 1

    def test_empty_beyond_top_part(self):
        base = SeriesMatrix.diagonal_powers(QQ, 3, 2, (0, 2))
        rep = proj_count_contact(None, 2, ContactQuery(MODE_AT_LEAST, 3, 3, primes=(2, 3)), fixed_base=base)
        assert rep.status == STATUS_EXACT_EMPTY

    def test_unit_base_forces_order_zero(self):
        base = SeriesMatrix.diagonal_powers(QQ, 2, 2, (0, 0))
        rep = proj_count_contact(None, 2, ContactQuery(MODE_AT_LEAST, 1, 2, primes=(2, 3)), fixed_base=base)
        assert rep.status == STATUS_EXACT_EMPTY

    def test_cone_counts_divisible_by_unit_group(self):
        # exercised internally: a failed division raises
        for lam in [(0, 1), (1, 2), (0, 0, 2)]:
            base = SeriesMatrix.diagonal_powers(QQ, 2, len(lam), lam)
            proj_count_contact(None, len(lam), ContactQuery(MODE_AT_LEAST, 1, 2, primes=(2, 3)), fixed_base=base)

    def test_polynomial_generators_without_base(self):
        # chart-style generators over the u variables themselves
        us = ["y1", "y2"]
        gens = [parse_poly("y1", us)]
        rep = proj_count_contact(gens, 2, ContactQuery(MODE_AT_LEAST, 1, 1, primes=(2, 3)))
        # ord(u1) >= 1 with some unit coordinate: u2 must be the unit
        assert rep.consensus_codim == 1
