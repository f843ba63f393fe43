import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pivotqg.errors import EmptyInput, OverlappingEdits, RangeOutOfBounds
from pivotqg.text_review import (apply_edits, detokenize, review_paragraph,
                                 tokenize)


class TestReviewParagraph:
    def test_clean_ascii_has_no_flags(self):
        assert review_paragraph("Gandhi was born in 1869.") == []

    def test_non_ascii_and_url_both_flagged(self):
        text = "café at http://x.io today"
        flags = review_paragraph(text)
        assert [f.kind for f in flags] == ["non_ascii", "url"]
        assert flags[0].char_range == (3, 4)
        assert flags[0].excerpt == "é"
        assert flags[1].excerpt == "http://x.io"
        assert text[flags[1].char_range[0]:flags[1].char_range[1]] == "http://x.io"

    def test_non_ascii_runs_enumerated_by_code_point(self):
        # oracle: maximal runs of code points > 127, enumerated by hand
        text = "naïve résumé"
        expected = []
        run = None
        for i, ch in enumerate(text):
            if ord(ch) > 127:
                run = (run[0], i + 1) if run else (i, i + 1)
            elif run:
                expected.append(run)
                run = None
        if run:
            expected.append(run)
        assert expected == [(2, 3), (7, 8), (11, 12)]
        flags = review_paragraph(text)
        assert [f.char_range for f in flags] == expected
        assert all(f.kind == "non_ascii" for f in flags)

    def test_url_inside_text_excludes_trailing_punctuation(self):
        flags = review_paragraph("see https://example.com/x, then leave")
        assert len(flags) == 1
        assert flags[0].excerpt == "https://example.com/x"

    def test_www_scheme_flagged(self):
        flags = review_paragraph("go to www.example.org now")
        assert flags[0].kind == "url"
        assert flags[0].excerpt == "www.example.org"

    def test_non_ascii_inside_url_is_covered_by_url_flag(self):
        flags = review_paragraph("x http://café.io y")
        assert [f.kind for f in flags] == ["url"]

    def test_empty_input_rejected(self):
        with pytest.raises(EmptyInput):
            review_paragraph("")
        with pytest.raises(EmptyInput):
            review_paragraph("   \n ")

    def test_flags_are_disjoint_sorted_and_match_excerpts(self):
        text = "é http://a.io naïve www.b.org café"
        flags = review_paragraph(text)
        for f in flags:
            assert text[f.char_range[0]:f.char_range[1]] == f.excerpt
        starts = [f.char_range[0] for f in flags]
        assert starts == sorted(starts)
        for a, b in zip(flags, flags[1:]):
            assert a.char_range[1] <= b.char_range[0]

    def test_deleting_all_flags_leaves_no_non_ascii(self):
        text = "héllo ünïverse at http://x.io über alles"
        flags = review_paragraph(text)
        cleaned = apply_edits(text, [(f.char_range, "") for f in flags])
        assert [f for f in review_paragraph(cleaned)
                if f.kind == "non_ascii"] == []


class TestApplyEdits:
    def test_single_substitution(self):
        assert apply_edits("café", [((3, 4), "e")]) == "cafe"

    def test_no_edits_is_identity(self):
        assert apply_edits("unchanged text", []) == "unchanged text"

    def test_deletion_by_hand(self):
        # "a http://x b": deleting (2, 10) removes "http://x" leaving "a  b"
        assert apply_edits("a http://x b", [((2, 10), "")]) == "a  b"

    def test_multiple_edits_applied_right_to_left(self):
        assert apply_edits("abcdef", [((0, 1), "X"), ((3, 5), "YY")]) == "XbcYYf"

    def test_overlap_rejected(self):
        with pytest.raises(OverlappingEdits):
            apply_edits("abcdef", [((0, 3), "x"), ((2, 4), "y")])

    def test_out_of_bounds_rejected(self):
        with pytest.raises(RangeOutOfBounds):
            apply_edits("abc", [((1, 9), "x")])

    def test_touching_ranges_allowed(self):
        assert apply_edits("abcd", [((0, 2), "x"), ((2, 4), "y")]) == "xy"


class TestTokenize:
    def test_simple_sentence(self):
        p = tokenize("Gandhi was born.")
        assert p.tokens == ["Gandhi", "was", "born", "."]

    def test_punctuation_is_split_off(self):
        assert tokenize("1909, India").tokens == ["1909", ",", "India"]

    def test_internal_punctuation_stays(self):
        assert tokenize("state-of-the-art isn't bad").tokens == \
            ["state-of-the-art", "isn't", "bad"]

    def test_offsets_slice_back_to_tokens(self):
        text = '"Hello," she said (quietly).'
        p = tokenize(text)
        for tok, (s, e) in zip(p.tokens, p.token_char_offsets):
            assert text[s:e] == tok

    def test_offsets_strictly_increasing_and_non_overlapping(self):
        p = tokenize("a bb ccc... dddd")
        assert all(s < e for s, e in p.token_char_offsets)
        starts = [s for s, _ in p.token_char_offsets]
        ends = [e for _, e in p.token_char_offsets]
        assert all(a < b for a, b in zip(starts, starts[1:]))
        assert all(e1 <= s2 for e1, s2 in zip(ends, starts[1:]))

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            tokenize("  ")

    @settings(max_examples=200)
    @given(st.text(
        alphabet=st.characters(min_codepoint=32, max_codepoint=126),
        min_size=1, max_size=80,
    ).filter(lambda s: s.strip()))
    def test_round_trip_on_clean_ascii(self, text):
        assert detokenize(tokenize(text)) == text
