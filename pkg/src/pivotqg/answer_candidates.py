"""Pivotal-answer candidates and BIO span encoding.

Candidate spans come from a pluggable annotator (entities / noun
phrases); users can also pick arbitrary character ranges, which are
snapped outward to token boundaries. A chosen span is encoded into the
source token sequence as one contiguous B I* block, everything else O.
"""

from __future__ import annotations

from dataclasses import dataclass

from .annotators import Annotator
from .errors import EmptyInput, EmptySpan, MalformedTags, RangeOutOfBounds, SpanMisaligned
from .text_review import Paragraph

NAMED_ENTITY = "named_entity"
NOUN_PHRASE = "noun_phrase"
CUSTOM = "custom"


@dataclass(frozen=True)
class AnswerSpan:
    char_range: tuple[int, int]
    token_range: tuple[int, int]  # inclusive token indices
    surface: str
    source: str  # named_entity | noun_phrase | custom


@dataclass
class BioTaggedInput:
    tokens: list[str]
    tags: list[str]  # "B" | "I" | "O"


def _snap_to_tokens(paragraph: Paragraph,
                    char_range: tuple[int, int]) -> tuple[int, int]:
    """Token range (inclusive) of all tokens overlapping char_range."""
    start, end = char_range
    n = len(paragraph.raw_text)
    if not (0 <= start <= end <= n):
        raise RangeOutOfBounds(f"range ({start}, {end}) outside [0, {n}]")
    if start == end:
        raise EmptySpan(f"range ({start}, {end}) covers no characters")
    hit = [i for i, (s, e) in enumerate(paragraph.token_char_offsets)
           if s < end and e > start]
    if not hit:
        raise EmptySpan(f"range ({start}, {end}) covers no token")
    return hit[0], hit[-1]


def _span_from_tokens(paragraph: Paragraph, first: int, last: int,
                      source: str) -> AnswerSpan:
    start = paragraph.token_char_offsets[first][0]
    end = paragraph.token_char_offsets[last][1]
    return AnswerSpan(char_range=(start, end), token_range=(first, last),
                      surface=paragraph.raw_text[start:end], source=source)


def validate_custom_span(paragraph: Paragraph,
                         char_range: tuple[int, int]) -> AnswerSpan:
    """Snap a user-selected character range outward to token boundaries.

    Expansion never shrinks the selection; overlapping spans across
    separate calls are fine.
    """
    first, last = _snap_to_tokens(paragraph, char_range)
    return _span_from_tokens(paragraph, first, last, CUSTOM)


def extract_candidates(paragraph: Paragraph, kind: str,
                       annotator: Annotator) -> list[AnswerSpan]:
    """Deduplicated, offset-sorted candidate spans of the requested kind."""
    if not paragraph.tokens:
        raise EmptyInput("paragraph has no tokens")
    if kind not in (NAMED_ENTITY, NOUN_PHRASE):
        raise ValueError(f"unknown candidate kind {kind!r}")
    annotation = annotator.annotate(paragraph.raw_text)
    if kind == NAMED_ENTITY:
        ranges = [(s, e) for s, e, _ in annotation.entities]
    else:
        ranges = list(annotation.noun_phrases)

    spans: list[AnswerSpan] = []
    seen: set[tuple[int, int]] = set()
    for start, end in ranges:
        try:
            first, last = _snap_to_tokens(paragraph, (start, end))
        except (RangeOutOfBounds, EmptySpan):
            continue  # sloppy annotator output; not the user's problem
        span = _span_from_tokens(paragraph, first, last, kind)
        if span.char_range in seen:
            continue
        seen.add(span.char_range)
        spans.append(span)
    spans.sort(key=lambda s: s.char_range)
    return spans


def _check_span(paragraph: Paragraph, span: AnswerSpan) -> None:
    first, last = span.token_range
    if not (0 <= first <= last < len(paragraph.tokens)):
        raise SpanMisaligned(f"token range {span.token_range} out of bounds")
    start = paragraph.token_char_offsets[first][0]
    end = paragraph.token_char_offsets[last][1]
    if (start, end) != span.char_range:
        raise SpanMisaligned(
            f"char range {span.char_range} does not sit on token boundaries")
    if paragraph.raw_text[start:end] != span.surface:
        raise SpanMisaligned("surface text does not match the paragraph")


def encode_bio(paragraph: Paragraph, span: AnswerSpan) -> BioTaggedInput:
    """Mark the span as B I* in the paragraph's token sequence."""
    _check_span(paragraph, span)
    first, last = span.token_range
    tags = ["O"] * len(paragraph.tokens)
    tags[first] = "B"
    for i in range(first + 1, last + 1):
        tags[i] = "I"
    return BioTaggedInput(tokens=list(paragraph.tokens), tags=tags)


def decode_bio(tagged: BioTaggedInput) -> tuple[int, int]:
    """Inverse of encode_bio: the (first, last) indices of the B I* block."""
    if len(tagged.tags) != len(tagged.tokens):
        raise MalformedTags("tags and tokens differ in length")
    b_positions = [i for i, t in enumerate(tagged.tags) if t == "B"]
    if len(b_positions) != 1:
        raise MalformedTags(f"expected exactly one B, got {len(b_positions)}")
    first = b_positions[0]
    last = first
    for i, tag in enumerate(tagged.tags):
        if tag == "I":
            if i != last + 1:
                raise MalformedTags(f"I tag at {i} not contiguous with block")
            last = i
        elif tag not in ("B", "O"):
            raise MalformedTags(f"unknown tag {tag!r} at {i}")
    return first, last
