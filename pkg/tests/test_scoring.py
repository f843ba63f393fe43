import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pivotqg.answer_candidates import AnswerSpan
from pivotqg.errors import EmptyInput, NonFiniteInput
from pivotqg.qg_model import GeneratedQuestion
from pivotqg.scoring import (apply_knobs, group_by_stem, inter_confidence,
                             intra_confidence, stem_key)


def span(surface, start=0, source="custom"):
    return AnswerSpan(char_range=(start, start + len(surface)),
                      token_range=(0, 0), surface=surface, source=source)


def question(score, src_len=3):
    return GeneratedQuestion(tokens=["q"], beam_score=score,
                             attention=np.ones((1, src_len)) / src_len)


class TestIntraConfidence:
    def test_zero_maps_to_half(self):
        assert intra_confidence(0.0) == 0.5

    def test_ln3_maps_to_three_quarters(self):
        assert intra_confidence(math.log(3)) == pytest.approx(0.75, abs=1e-12)

    def test_deep_negative_no_underflow(self):
        value = intra_confidence(-700.0)
        assert value > 0.0
        assert math.isfinite(value)

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteInput):
            intra_confidence(float("nan"))
        with pytest.raises(NonFiniteInput):
            intra_confidence(float("inf"))

    @settings(max_examples=200)
    @given(st.floats(-700, 30))
    def test_range_is_open_unit_interval(self, x):
        v = intra_confidence(x)
        assert 0.0 < v < 1.0

    @settings(max_examples=100)
    @given(st.floats(-300, 0), st.floats(1e-6, 10))
    def test_strictly_increasing_on_beam_score_domain(self, x, delta):
        # beam scores are log-prob sums, never positive
        assert intra_confidence(x + delta) > intra_confidence(x)


class TestInterConfidence:
    def test_endpoints_exact(self):
        P = {span("a"): 0.2, span("b", 5): 0.5, span("c", 10): 0.8}
        out = inter_confidence(P)
        assert out[span("a")] == 0.0
        assert out[span("c", 10)] == 1.0

    def test_midpoint_value(self):
        P = {span("a"): 0.2, span("b", 5): 0.5, span("c", 10): 0.8}
        out = inter_confidence(P)
        assert out[span("b", 5)] == pytest.approx(0.5, abs=1e-12)

    def test_degenerate_all_equal_get_one(self):
        P = {span("a"): 0.6, span("b", 5): 0.6}
        assert set(inter_confidence(P).values()) == {1.0}

    def test_single_answer_gets_one(self):
        assert list(inter_confidence({span("only"): 0.42}).values()) == [1.0]

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            inter_confidence({})

    @settings(max_examples=100)
    @given(st.lists(st.floats(0.01, 0.99), min_size=1, max_size=8))
    def test_always_contains_a_one_and_min_at_zero(self, probs):
        P = {span(f"s{i}", i * 10): p for i, p in enumerate(probs)}
        out = inter_confidence(P)
        assert max(out.values()) == 1.0
        if len(set(probs)) > 1:
            assert min(out.values()) == 0.0


class TestGroupByStem:
    def test_switching_switches_share_a_facet(self):
        results = {
            span("switching", 0): [question(-1.0)],
            span("switches", 20): [question(-2.0)],
        }
        facets = group_by_stem(results)
        assert len(facets) == 1
        assert facets[0].stem == "switch"
        assert len(facets[0].members) == 2

    def test_distinct_stems_make_distinct_facets(self):
        results = {
            span("India", 0): [question(-1.0)],
            span("1869", 10): [question(-2.0)],
        }
        facets = group_by_stem(results)
        assert len(facets) == 2
        assert {f.stem for f in facets} == {"india", "1869"}

    def test_multiword_stem_key(self):
        assert stem_key("running shoes") == "run shoe"
        results = {span("running shoes", 0): [question(-1.0)]}
        assert group_by_stem(results)[0].stem == "run shoe"

    def test_partition_every_pair_in_exactly_one_facet(self):
        results = {
            span("switching", 0): [question(-1.0), question(-3.0)],
            span("switches", 20): [question(-2.0)],
            span("India", 40): [question(-0.5)],
        }
        facets = group_by_stem(results)
        seen = []
        for facet in facets:
            for member in facet.members:
                for q in member.questions:
                    seen.append(id(q))
        expected = [id(q) for qs in results.values() for q in qs]
        assert sorted(seen) == sorted(expected)

    def test_questions_sorted_by_intra_descending(self):
        results = {span("India", 0): [question(-3.0), question(-0.5),
                                      question(-1.5)]}
        facets = group_by_stem(results)
        confs = [q.intra_confidence for q in facets[0].members[0].questions]
        assert confs == sorted(confs, reverse=True)

    def test_facets_sorted_by_inter_descending(self):
        results = {
            span("alpha", 0): [question(-5.0)],
            span("beta", 10): [question(-0.1)],
            span("gamma", 20): [question(-2.0)],
        }
        facets = group_by_stem(results)
        inters = [f.inter_confidence for f in facets]
        assert inters == sorted(inters, reverse=True)
        assert facets[0].members[0].answer.surface == "beta"

    def test_spans_without_questions_disappear(self):
        results = {span("empty", 0): [], span("full", 10): [question(-1.0)]}
        facets = group_by_stem(results)
        assert len(facets) == 1
        assert facets[0].members[0].answer.surface == "full"

    def test_empty_results_give_no_facets(self):
        assert group_by_stem({}) == []


class TestApplyKnobs:
    def _facets(self):
        return group_by_stem({
            span("switching", 0): [question(-0.2), question(-3.0)],
            span("switches", 20): [question(-1.0)],
            span("India", 40): [question(-4.0)],
        })

    def test_zero_thresholds_are_identity(self):
        facets = self._facets()
        out = apply_knobs(facets, 0.0, 0.0)
        assert [(f.stem, len(f.members)) for f in out] == \
            [(f.stem, len(f.members)) for f in facets]

    def test_max_intra_threshold_filters_everything(self):
        assert apply_knobs(self._facets(), 1.0, 0.0) == []

    def test_monotone_raising_thresholds_never_adds(self):
        facets = self._facets()

        def count(fs):
            return sum(len(m.questions) for f in fs for m in f.members)

        grid = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
        for intra in grid:
            for inter in grid:
                base = count(apply_knobs(facets, intra, inter))
                assert count(apply_knobs(facets, min(1.0, intra + 0.1),
                                         inter)) <= base
                assert count(apply_knobs(facets, intra,
                                         min(1.0, inter + 0.1))) <= base

    def test_original_facets_untouched(self):
        facets = self._facets()
        before = [(f.stem, [len(m.questions) for m in f.members])
                  for f in facets]
        apply_knobs(facets, 0.9, 0.9)
        after = [(f.stem, [len(m.questions) for m in f.members])
                 for f in facets]
        assert before == after

    def test_out_of_range_thresholds_rejected(self):
        with pytest.raises(ValueError):
            apply_knobs(self._facets(), -0.1, 0.0)
        with pytest.raises(ValueError):
            apply_knobs(self._facets(), 0.0, 1.5)
