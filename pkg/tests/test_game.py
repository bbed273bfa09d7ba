import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pd_deposit import (
    Agreement,
    PayoffMatrix,
    Player,
    StagePair,
    agreement_payoff,
    is_effective,
    nash_baseline,
    render,
    stage_payoff,
    validate_matrix,
)
from pd_deposit.game import InvalidMatrixError, check_matrix

from .conftest import bd_free_pairs, matrices
from .oracles import naive_totals


class TestValidateMatrix:
    def test_reference_matrix_is_valid(self, ref_matrix):
        assert validate_matrix(ref_matrix) == []

    def test_boundary_equality_fails(self):
        m = PayoffMatrix(a=8, b=8, c=4, d=24, e=8, f=4, g=6, h=6)
        assert validate_matrix(m) == ["e > a"]
        with pytest.raises(InvalidMatrixError):
            check_matrix(m)

    def test_textbook_values(self):
        assert validate_matrix(PayoffMatrix(a=3, b=3, c=0, d=5, e=5, f=0, g=1, h=1)) == []

    def test_reports_every_violation(self):
        m = PayoffMatrix(a=0, b=0, c=0, d=0, e=0, f=0, g=0, h=0)
        assert len(validate_matrix(m)) == 6

    def test_rational_strings(self):
        m = PayoffMatrix.from_json(json.dumps({**{k: 1 for k in "abcdefgh"}, "e": "7/2", "a": "5/2",
                                               "g": "3/2", "c": "1/2", "d": 4, "b": 3, "h": 2, "f": 1}))
        assert m.e == Fraction(7, 2)
        assert validate_matrix(m) == []

    def test_rejects_floats_and_bad_keys(self):
        with pytest.raises(TypeError):
            PayoffMatrix(a=1.5, b=1, c=1, d=1, e=1, f=1, g=1, h=1)
        with pytest.raises(ValueError):
            PayoffMatrix.from_mapping({"a": 1})

    def test_json_round_trip(self, ref_matrix):
        assert PayoffMatrix.from_json(json.dumps(ref_matrix.to_dict())) == ref_matrix


class TestStagePayoff:
    @pytest.mark.parametrize(
        "pair,expected",
        [(StagePair.BD, (6, 6)), (StagePair.AD, (4, 24)), (StagePair.AC, (8, 8)), (StagePair.BC, (10, 4))],
    )
    def test_cells(self, ref_matrix, pair, expected):
        assert stage_payoff(pair, ref_matrix) == expected

    def test_deviation(self):
        assert StagePair.AC.deviation(Player.TOM) is StagePair.BC
        assert StagePair.AD.deviation(Player.JACK) is StagePair.AC
        assert StagePair.BC.deviation(Player.JACK) is StagePair.BD


class TestAgreementPayoff:
    def test_10_19_0_totals(self, ref_matrix):
        s = agreement_payoff(Agreement.from_counts(10, 19, 0), ref_matrix)
        assert (s.tom_total, s.jack_total) == (176, 496)

    def test_22_7_0_totals(self, ref_matrix):
        s = agreement_payoff(Agreement.from_counts(22, 7, 0), ref_matrix)
        assert (s.tom_total, s.jack_total) == (248, 256)

    def test_nash_agreement(self, ref_matrix):
        s = agreement_payoff(Agreement((StagePair.BD,) * 29), ref_matrix)
        assert (s.tom_total, s.jack_total) == (174, 174)

    def test_empty_rejected(self, ref_matrix):
        with pytest.raises(ValueError):
            agreement_payoff(Agreement(()), ref_matrix)

    def test_expectation_is_exact(self, ref_matrix):
        s = agreement_payoff(Agreement.from_counts(10, 19, 0), ref_matrix)
        assert s.tom_expectation == Fraction(176, 29)
        assert render(s.tom_expectation) == "6.069"

    @settings(max_examples=150)
    @given(matrices(), st.lists(st.sampled_from(list(StagePair)), min_size=1, max_size=25))
    def test_matches_naive_sum(self, m, stages):
        s = agreement_payoff(Agreement(tuple(stages)), m)
        assert (s.tom_total, s.jack_total) == naive_totals(stages, m)
        assert s.tom_expectation * s.n == s.tom_total
        assert s.jack_expectation * s.n == s.jack_total

    @given(matrices(), st.lists(st.sampled_from(list(StagePair)), min_size=1, max_size=15), st.randoms())
    def test_permutation_invariant(self, m, stages, rnd):
        shuffled = list(stages)
        rnd.shuffle(shuffled)
        assert agreement_payoff(Agreement(tuple(stages)), m) == agreement_payoff(Agreement(tuple(shuffled)), m)


class TestNashAndEffectiveness:
    @pytest.mark.parametrize("n,expected", [(29, (174, 174)), (0, (0, 0)), (3, (18, 18))])
    def test_baseline(self, ref_matrix, n, expected):
        assert nash_baseline(n, ref_matrix) == expected

    def test_negative_horizon(self, ref_matrix):
        with pytest.raises(ValueError):
            nash_baseline(-1, ref_matrix)

    def test_26_3_0_effective(self, ref_matrix):
        assert is_effective(Agreement.from_counts(26, 3, 0), ref_matrix)

    def test_all_nash_not_effective(self, ref_matrix):
        assert not is_effective(Agreement((StagePair.BD,) * 29), ref_matrix)

    def test_boundary_composition_not_effective(self, ref_matrix):
        ag = Agreement.from_counts(9, 19, 1)
        assert agreement_payoff(ag, ref_matrix).tom_total == 174
        assert not is_effective(ag, ref_matrix)

    def test_boundary_is_unique_with_at_most_two_ac(self, ref_matrix):
        # brute-force scan over all N=29 compositions with n_ac <= 2
        hits = []
        for n_ac in range(3):
            for n_bc in range(30 - n_ac):
                n_ad = 29 - n_ac - n_bc
                tom = 10 * n_bc + 4 * n_ad + 8 * n_ac
                jack = 4 * n_bc + 24 * n_ad + 8 * n_ac
                if (tom == 174 and jack >= 174) or (jack == 174 and tom >= 174):
                    hits.append((n_bc, n_ad, n_ac))
        assert hits == [(9, 19, 1)]

    @given(matrices(), st.integers(1, 30))
    def test_all_bd_never_all_ac_always(self, m, n):
        assert not is_effective(Agreement((StagePair.BD,) * n), m)
        assert is_effective(Agreement((StagePair.AC,) * n), m)


class TestAgreementText:
    def test_parse_commas_and_spaces(self):
        ag = Agreement.parse("AC,BC BC, ad")
        assert ag.stages == (StagePair.AC, StagePair.BC, StagePair.BC, StagePair.AD)
        assert str(ag) == "AC,BC,BC,AD"

    def test_parse_rejects_unknown(self):
        with pytest.raises(ValueError, match="XY"):
            Agreement.parse("AC,XY")

    def test_projection(self):
        ag = Agreement.parse("AC,AD,BC")
        assert ag.moves(Player.TOM) == "AAB"
        assert ag.moves(Player.JACK) == "CDC"

    @given(st.lists(bd_free_pairs, max_size=20))
    def test_text_round_trip(self, stages):
        ag = Agreement(tuple(stages))
        assert Agreement.parse(str(ag)) == ag


@pytest.mark.parametrize(
    "value,expected",
    [
        (Fraction(176, 29), "6.069"),
        (Fraction(496, 29), "17.103"),
        (Fraction(1, 2000), "0.001"),
        (Fraction(-1, 2000), "-0.001"),
        (Fraction(1, 3000), "0.000"),
        (Fraction(7), "7.000"),
    ],
)
def test_render_half_up(value, expected):
    assert render(value) == expected
