"""Confidence scores, stem-keyed facets, and the two filter knobs.

A question's own confidence is the sigmoid of its beam score. Answers
are then ranked against each other by min-max normalizing each answer's
best question confidence. Answers whose surfaces share a stemmed form
("switching" / "switches" -> "switch") collapse into one facet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .answer_candidates import AnswerSpan
from .errors import EmptyInput, NonFiniteInput
from .qg_model import GeneratedQuestion
from .stemmer import stem


def intra_confidence(beam_score: float) -> float:
    """exp(x) / (1 + exp(x)), evaluated in the stable branch."""
    x = float(beam_score)
    if not math.isfinite(x):
        raise NonFiniteInput(f"beam score {x!r}")
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def inter_confidence(per_answer_max: dict[AnswerSpan, float]) -> dict[AnswerSpan, float]:
    """Min-max normalize each answer's best question confidence.

    When all answers tie (max == min), every answer gets 1.0 so a lone
    answer is never filtered out by its own normalization.
    """
    if not per_answer_max:
        raise EmptyInput("no answers to normalize over")
    lo = min(per_answer_max.values())
    hi = max(per_answer_max.values())
    if hi == lo:
        return {span: 1.0 for span in per_answer_max}
    return {span: (p - lo) / (hi - lo) for span, p in per_answer_max.items()}


def stem_key(surface: str) -> str:
    """Facet key: lowercase, stem each whitespace-separated word."""
    return " ".join(stem(w) for w in surface.lower().split())


@dataclass
class FacetMember:
    answer: AnswerSpan
    questions: list[GeneratedQuestion]
    inter_confidence: float


@dataclass
class QuestionFacet:
    stem: str
    members: list[FacetMember]
    inter_confidence: float


def group_by_stem(results: dict[AnswerSpan, list[GeneratedQuestion]]) -> list[QuestionFacet]:
    """Partition (answer, questions) pairs into stem-keyed facets.

    Fills in intra confidences, computes inter confidences across
    answers, sorts questions best-first within each member, and orders
    facets by inter confidence (ties: first occurrence in the paragraph).
    """
    populated = {span: qs for span, qs in results.items() if qs}
    if not populated:
        return []
    for questions in populated.values():
        for q in questions:
            if q.intra_confidence is None:
                q.intra_confidence = intra_confidence(q.beam_score)
    best = {span: max(q.intra_confidence for q in qs)
            for span, qs in populated.items()}
    inter = inter_confidence(best)

    buckets: dict[str, list[AnswerSpan]] = {}
    for span in populated:
        buckets.setdefault(stem_key(span.surface), []).append(span)

    facets = []
    for key, spans in buckets.items():
        spans.sort(key=lambda s: s.char_range)
        members = [
            FacetMember(
                answer=span,
                questions=sorted(populated[span],
                                 key=lambda q: q.intra_confidence,
                                 reverse=True),
                inter_confidence=inter[span],
            )
            for span in spans
        ]
        facets.append(QuestionFacet(
            stem=key,
            members=members,
            inter_confidence=max(m.inter_confidence for m in members),
        ))
    facets.sort(key=lambda f: (-f.inter_confidence,
                               f.members[0].answer.char_range))
    return facets


def apply_knobs(facets: list[QuestionFacet], intra_threshold: float,
                inter_threshold: float) -> list[QuestionFacet]:
    """Non-destructive view: drop questions below the intra knob and
    answers below the inter knob, pruning emptied members and facets."""
    if not 0.0 <= intra_threshold <= 1.0 or not 0.0 <= inter_threshold <= 1.0:
        raise ValueError("knob thresholds must be in [0, 1]")
    out: list[QuestionFacet] = []
    for facet in facets:
        members = []
        for member in facet.members:
            if member.inter_confidence < inter_threshold:
                continue
            kept = [q for q in member.questions
                    if q.intra_confidence is not None
                    and q.intra_confidence >= intra_threshold]
            if kept:
                members.append(replace(member, questions=kept))
        if members:
            out.append(replace(facet, members=members,
                               inter_confidence=max(m.inter_confidence
                                                    for m in members)))
    return out
