"""Paragraph review and tokenization.

Raw input is screened for content the generator cannot consume (non-ASCII
characters, URLs); the user resolves the flags by editing before anything
downstream runs. Tokenization is deterministic and offset-preserving so
that answer spans and attention heat maps stay anchored to the original
text.
"""

from __future__ import annotations

import hashlib
import re
import string
from dataclasses import dataclass

from .errors import EmptyInput, OverlappingEdits, RangeOutOfBounds

URL_RE = re.compile(r"(?:https?://|www\.)\S+")
# stripped off the tail of a URL match so "see http://x.io." flags "http://x.io"
_TRAILING_PUNCT = ".,;:!?)]}>\"'"

_SPLITTABLE = set(string.punctuation)


@dataclass
class Paragraph:
    raw_text: str
    tokens: list[str]
    token_char_offsets: list[tuple[int, int]]
    id: str

    def token_at_char(self, pos: int) -> int | None:
        """Index of the token covering character pos, or None if in a gap."""
        for i, (s, e) in enumerate(self.token_char_offsets):
            if s <= pos < e:
                return i
        return None


@dataclass
class ReviewFlag:
    kind: str  # "non_ascii" | "url"
    char_range: tuple[int, int]
    excerpt: str
    message: str


def review_paragraph(raw_text: str) -> list[ReviewFlag]:
    """Flag every URL and every maximal non-ASCII run in raw_text.

    Flags are disjoint (a non-ASCII character inside a URL is covered by
    the URL flag) and sorted by start offset. An empty result means the
    text is clean and generation may proceed.
    """
    if not raw_text or not raw_text.strip():
        raise EmptyInput("paragraph text is empty")

    flags: list[ReviewFlag] = []
    covered = [False] * len(raw_text)

    for m in URL_RE.finditer(raw_text):
        start, end = m.start(), m.end()
        while end > start and raw_text[end - 1] in _TRAILING_PUNCT:
            end -= 1
        if end == start:
            continue
        excerpt = raw_text[start:end]
        flags.append(ReviewFlag(
            kind="url",
            char_range=(start, end),
            excerpt=excerpt,
            message=f"URL {excerpt!r}: remove it or replace it with plain text",
        ))
        for i in range(start, end):
            covered[i] = True

    run_start: int | None = None
    for i, ch in enumerate(raw_text + "\0"):
        is_flagged = i < len(raw_text) and ord(ch) > 127 and not covered[i]
        if is_flagged and run_start is None:
            run_start = i
        elif not is_flagged and run_start is not None:
            excerpt = raw_text[run_start:i]
            flags.append(ReviewFlag(
                kind="non_ascii",
                char_range=(run_start, i),
                excerpt=excerpt,
                message=f"non-ASCII text {excerpt!r}: edit or remove it",
            ))
            run_start = None

    flags.sort(key=lambda f: f.char_range[0])
    return flags


def apply_edits(raw_text: str,
                edits: list[tuple[tuple[int, int], str]]) -> str:
    """Apply (char_range, replacement) edits to raw_text.

    Ranges must be in bounds and non-overlapping; replacements are applied
    right to left so earlier offsets stay valid. The caller re-reviews the
    result.
    """
    n = len(raw_text)
    for (start, end), _ in edits:
        if not (0 <= start <= end <= n):
            raise RangeOutOfBounds(f"edit range ({start}, {end}) outside [0, {n}]")
    ordered = sorted(edits, key=lambda e: e[0][0])
    for ((_, prev_end), _), ((next_start, _), _) in zip(ordered, ordered[1:]):
        if next_start < prev_end:
            raise OverlappingEdits("edit ranges overlap")
    out = raw_text
    for (start, end), replacement in reversed(ordered):
        out = out[:start] + replacement + out[end:]
    return out


def tokenize(raw_text: str, paragraph_id: str | None = None) -> Paragraph:
    """Whitespace-and-punctuation tokenization with an exact offset map.

    Chunks are split on whitespace, then leading/trailing ASCII punctuation
    is peeled off one character at a time into separate tokens. Internal
    punctuation (hyphens, apostrophes) stays inside the token. Every token
    equals raw_text sliced at its offsets, so offset-based reconstruction
    is exact.
    """
    if not raw_text or not raw_text.strip():
        raise EmptyInput("cannot tokenize empty text")

    tokens: list[str] = []
    offsets: list[tuple[int, int]] = []

    for m in re.finditer(r"\S+", raw_text):
        start, end = m.start(), m.end()
        # leading punctuation, one token per character
        while start < end and raw_text[start] in _SPLITTABLE:
            tokens.append(raw_text[start])
            offsets.append((start, start + 1))
            start += 1
        # trailing punctuation, peeled inside-out then emitted in order
        tail: list[tuple[int, int]] = []
        while end > start and raw_text[end - 1] in _SPLITTABLE:
            tail.append((end - 1, end))
            end -= 1
        if start < end:
            tokens.append(raw_text[start:end])
            offsets.append((start, end))
        for s, e in reversed(tail):
            tokens.append(raw_text[s:e])
            offsets.append((s, e))

    if paragraph_id is None:
        paragraph_id = hashlib.blake2s(raw_text.encode("utf-8"),
                                       digest_size=8).hexdigest()
    return Paragraph(raw_text=raw_text, tokens=tokens,
                     token_char_offsets=offsets, id=paragraph_id)


def detokenize(paragraph: Paragraph) -> str:
    """Reconstruct the raw text from tokens and the offset map."""
    pieces: list[str] = []
    cursor = 0
    for tok, (start, end) in zip(paragraph.tokens, paragraph.token_char_offsets):
        pieces.append(paragraph.raw_text[cursor:start])
        pieces.append(tok)
        cursor = end
    pieces.append(paragraph.raw_text[cursor:])
    return "".join(pieces)
