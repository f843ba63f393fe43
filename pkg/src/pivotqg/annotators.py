"""Pluggable linguistic annotators for candidate answer extraction.

Two backends behind one contract: an HTTP client for an external
annotation service, and a built-in heuristic fallback so desk-scale runs
and tests need no network. The wire contract is
request {"text": ...} -> response {"tokens": [{"text","start","end"}],
"entities": [{"start","end","label"}], "noun_phrases": [{"start","end"}]}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Protocol

import requests

from .errors import AnnotatorUnavailable
from .text_review import tokenize

_STOPWORDS = {
    "the", "a", "an", "this", "that", "these", "those", "he", "she", "it",
    "they", "we", "you", "i", "his", "her", "its", "their", "our", "my",
    "your", "in", "on", "at", "of", "for", "with", "from", "to", "by",
    "and", "or", "but", "nor", "so", "yet", "if", "as", "not", "no",
    "there", "here", "when", "where", "who", "whom", "whose", "what",
    "which", "how", "why", "then", "than", "after", "before", "while",
    "during", "about", "into", "over", "under", "between", "both", "each",
    "few", "more", "most", "other", "some", "such", "only", "own", "same",
    "too", "very", "just", "also", "however", "although", "because",
}

_DETERMINERS = {
    "the", "a", "an", "this", "that", "these", "those", "his", "her",
    "its", "their", "our", "my", "your", "each", "every", "some", "any",
}

_PRONOUNS = {"he", "she", "it", "they", "we", "you", "i", "him", "them",
             "us", "me", "who", "whom", "itself", "himself", "herself"}

_VERBS = {
    "is", "was", "are", "were", "be", "been", "being", "am", "has",
    "have", "had", "do", "does", "did", "will", "would", "can", "could",
    "shall", "should", "may", "might", "must", "born", "made", "make",
    "makes", "went", "go", "goes", "gone", "say", "said", "says", "see",
    "saw", "seen", "take", "took", "taken", "get", "got", "give", "gave",
    "given", "become", "became", "led", "won", "wrote", "written",
    "called", "known", "used", "found", "lived", "died", "moved",
}

_OTHER_CLOSED = _STOPWORDS | _PRONOUNS | _VERBS

_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less", "ary")
_ADJ_WORDS = {
    "big", "small", "old", "new", "good", "great", "high", "low",
    "famous", "important", "young", "early", "late", "major", "minor",
    "free", "full", "rich", "poor", "long", "short", "first", "last",
    "second", "third", "many", "several",
}

# lowercase surfaces always treated as entity tokens
_GAZETTEER = {
    "january", "february", "march", "april", "may", "june", "july",
    "august", "september", "october", "november", "december",
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday",
    "sunday",
}


@dataclass
class Annotation:
    tokens: list[dict] = field(default_factory=list)
    entities: list[tuple[int, int, str]] = field(default_factory=list)
    noun_phrases: list[tuple[int, int]] = field(default_factory=list)


class Annotator(Protocol):
    def annotate(self, text: str) -> Annotation: ...


class HttpAnnotator:
    """Client for an external annotation service (base URL from config)."""

    def __init__(self, base_url: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def annotate(self, text: str) -> Annotation:
        try:
            resp = requests.post(f"{self.base_url}/annotate",
                                 json={"text": text}, timeout=self.timeout)
        except requests.RequestException as exc:
            raise AnnotatorUnavailable(str(exc)) from exc
        if resp.status_code != 200:
            raise AnnotatorUnavailable(
                f"annotator returned HTTP {resp.status_code}")
        try:
            data = resp.json()
        except ValueError as exc:
            raise AnnotatorUnavailable("annotator returned non-JSON") from exc
        return Annotation(
            tokens=data.get("tokens", []),
            entities=[(e["start"], e["end"], e.get("label", ""))
                      for e in data.get("entities", [])],
            noun_phrases=[(p["start"], p["end"])
                          for p in data.get("noun_phrases", [])],
        )


class HeuristicAnnotator:
    """Capitalization/gazetteer entities and regex-over-POS noun chunks.

    A deliberately small fallback: good enough to drive the workbench and
    the tests without an external tagger, not a real NER system.
    """

    # one char per token: d=determiner, a=adjective, n=number, N=noun, o=other
    _CHUNK_RE = re.compile(r"d?[an]*[Nn]+")

    def annotate(self, text: str) -> Annotation:
        paragraph = tokenize(text)
        tokens = [{"text": t, "start": s, "end": e}
                  for t, (s, e) in zip(paragraph.tokens,
                                       paragraph.token_char_offsets)]
        tags = "".join(self._pos(t) for t in paragraph.tokens)
        entities = self._entities(paragraph)
        noun_phrases = self._noun_chunks(paragraph, tags)
        return Annotation(tokens=tokens, entities=entities,
                          noun_phrases=noun_phrases)

    @staticmethod
    def _pos(token: str) -> str:
        lower = token.lower()
        if token.isdigit():
            return "n"
        if not any(c.isalpha() for c in token):
            return "o"
        if lower in _DETERMINERS:
            return "d"
        if lower in _OTHER_CLOSED:
            return "o"
        if lower in _ADJ_WORDS or lower.endswith(_ADJ_SUFFIXES):
            return "a"
        return "N"

    @staticmethod
    def _is_entity_token(token: str) -> bool:
        lower = token.lower()
        if token.isdigit():
            return True
        if lower in _GAZETTEER:
            return True
        return (token[:1].isupper() and any(c.isalpha() for c in token)
                and lower not in _OTHER_CLOSED and lower not in _DETERMINERS)

    def _entities(self, paragraph) -> list[tuple[int, int, str]]:
        spans = []
        i = 0
        n = len(paragraph.tokens)
        while i < n:
            if self._is_entity_token(paragraph.tokens[i]):
                j = i
                while j + 1 < n and self._is_entity_token(paragraph.tokens[j + 1]):
                    j += 1
                start = paragraph.token_char_offsets[i][0]
                end = paragraph.token_char_offsets[j][1]
                parts = paragraph.tokens[i:j + 1]
                label = "NUMBER" if all(p.isdigit() for p in parts) else "NAME"
                spans.append((start, end, label))
                i = j + 1
            else:
                i += 1
        return spans

    def _noun_chunks(self, paragraph, tags: str) -> list[tuple[int, int]]:
        chunks = []
        for m in self._CHUNK_RE.finditer(tags):
            first, last = m.start(), m.end() - 1
            start = paragraph.token_char_offsets[first][0]
            end = paragraph.token_char_offsets[last][1]
            chunks.append((start, end))
        return chunks
