"""Session lifecycle: review, candidates, generation, knobs, edits, export.

Sessions are stored as JSON documents (durable across restarts). Knob
filtering is a pure view over the stored results; edit histories are
append-only with version 0 being the machine-generated original. Any
text mutation invalidates spans and results.
"""

from __future__ import annotations

import math
import threading
import uuid
from datetime import datetime, timezone

from .annotators import Annotator
from .answer_candidates import AnswerSpan, extract_candidates, validate_custom_span
from .answerability import SpanScoringModel, is_answerable
from .errors import (EmptyInput, InvalidSpan, ModelUnavailable, PivotQGError,
                     UnknownFormat, UnresolvedFlags)
from .qg_model import QGModel, generate_questions
from .scoring import group_by_stem
from .store import SessionStore
from .text_review import apply_edits, review_paragraph, tokenize


class SessionNotFound(PivotQGError):
    pass


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _json_float(x: float | None) -> float | None:
    """JSON has no inf/nan; non-finite scores are reported as null."""
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def _flag_dict(flag) -> dict:
    return {"kind": flag.kind, "start": flag.char_range[0],
            "end": flag.char_range[1], "excerpt": flag.excerpt,
            "message": flag.message}


def _span_dict(span: AnswerSpan) -> dict:
    return {"start": span.char_range[0], "end": span.char_range[1],
            "token_first": span.token_range[0],
            "token_last": span.token_range[1],
            "surface": span.surface, "source": span.source}


def _span_from_dict(d: dict) -> AnswerSpan:
    return AnswerSpan(char_range=(d["start"], d["end"]),
                      token_range=(d["token_first"], d["token_last"]),
                      surface=d["surface"], source=d["source"])


class SessionManager:
    """Per-session mutations are serialized; reads see committed state."""

    def __init__(self, store: SessionStore, annotator: Annotator,
                 qg_model: QGModel | None = None,
                 filter_model: SpanScoringModel | None = None,
                 filter_threshold: float = 0.0,
                 beam_width: int | None = None,
                 default_knobs: tuple[float, float] = (0.0, 0.0)):
        self.store = store
        self.annotator = annotator
        self.qg_model = qg_model
        self.filter_model = filter_model
        self.filter_threshold = filter_threshold
        self.beam_width = beam_width
        self.default_knobs = default_knobs
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _load(self, session_id: str) -> dict:
        session = self.store.get(session_id)
        if session is None:
            raise SessionNotFound(session_id)
        return session

    # ---- lifecycle -----------------------------------------------------

    def create(self, text: str) -> dict:
        flags = review_paragraph(text)  # raises EmptyInput on blank text
        paragraph = tokenize(text)
        session = {
            "id": uuid.uuid4().hex,
            "created": _now(),
            "updated": _now(),
            "text": text,
            "flags": [_flag_dict(f) for f in flags],
            "paragraph": {
                "tokens": paragraph.tokens,
                "offsets": [list(o) for o in paragraph.token_char_offsets],
            },
            "candidates": {},
            "selected_spans": [],
            "answers": {},
            "questions": {},
            "facets": [],
            "filtered_out": [],
            "knobs": {"intra": self.default_knobs[0],
                      "inter": self.default_knobs[1]},
        }
        self.store.put(session["id"], session)
        return session

    def get(self, session_id: str) -> dict:
        return self._load(session_id)

    def edit_text(self, session_id: str,
                  edits: list[tuple[tuple[int, int], str]]) -> dict:
        with self._lock(session_id):
            session = self._load(session_id)
            new_text = apply_edits(session["text"], edits)
            flags = review_paragraph(new_text)
            paragraph = tokenize(new_text)
            session["text"] = new_text
            session["flags"] = [_flag_dict(f) for f in flags]
            session["paragraph"] = {
                "tokens": paragraph.tokens,
                "offsets": [list(o) for o in paragraph.token_char_offsets],
            }
            # stale generation never survives a text edit
            session["candidates"] = {}
            session["selected_spans"] = []
            session["answers"] = {}
            session["questions"] = {}
            session["facets"] = []
            session["filtered_out"] = []
            session["updated"] = _now()
            self.store.put(session_id, session)
            return session

    # ---- candidates ----------------------------------------------------

    def candidates(self, session_id: str, kind: str) -> list[dict]:
        session = self._load(session_id)
        if session["flags"]:
            raise UnresolvedFlags("resolve review flags before selecting answers")
        paragraph = tokenize(session["text"])
        spans = extract_candidates(paragraph, kind, self.annotator)
        prefix = "ne" if kind == "named_entity" else "np"
        items = [{"id": f"{prefix}{i}", **_span_dict(s)}
                 for i, s in enumerate(spans)]
        with self._lock(session_id):
            session = self._load(session_id)
            session["candidates"][kind] = items
            self.store.put(session_id, session)
        return items

    # ---- generation ----------------------------------------------------

    def _resolve_span_specs(self, session: dict, specs: list[dict]) -> list[AnswerSpan]:
        paragraph = tokenize(session["text"])
        cached = {item["id"]: item
                  for items in session["candidates"].values()
                  for item in items}
        spans: list[AnswerSpan] = []
        for spec in specs:
            if "id" in spec and spec["id"] is not None:
                item = cached.get(spec["id"])
                if item is None:
                    raise InvalidSpan(f"unknown candidate id {spec['id']!r}")
                spans.append(_span_from_dict(item))
                continue
            if spec.get("start") is None or spec.get("end") is None:
                raise InvalidSpan("span needs either an id or start/end offsets")
            try:
                spans.append(validate_custom_span(
                    paragraph, (spec["start"], spec["end"])))
            except PivotQGError as exc:
                raise InvalidSpan(str(exc)) from exc
        return spans

    def generate(self, session_id: str, span_specs: list[dict]) -> dict:
        if self.qg_model is None:
            raise ModelUnavailable("no generator checkpoint loaded")
        session = self._load(session_id)
        if session["flags"]:
            raise UnresolvedFlags("resolve review flags before generating")
        if not span_specs:
            raise InvalidSpan("no spans given")
        spans = self._resolve_span_specs(session, span_specs)
        paragraph = tokenize(session["text"])

        results = generate_questions(paragraph, spans, self.qg_model,
                                     beam_width=self.beam_width)

        filtered_out: list[dict] = []
        if self.filter_model is not None:
            for span, questions in results.items():
                kept = []
                for q in questions:
                    if not q.tokens:
                        kept.append(q)  # nothing to pack; filter is moot
                        continue
                    verdict = is_answerable(q.tokens, paragraph.tokens,
                                            self.filter_model,
                                            self.filter_threshold)
                    if verdict.answerable:
                        kept.append(q)
                    else:
                        filtered_out.append({
                            "question_text": q.text,
                            "answer_surface": span.surface,
                            "s_null": _json_float(verdict.s_null),
                            "s_best": _json_float(verdict.s_best),
                            "best_span": list(verdict.best_span)
                            if verdict.best_span else None,
                            "threshold": _json_float(verdict.threshold),
                            "answerable": verdict.answerable,
                        })
                results[span] = kept

        facets = group_by_stem(results)

        with self._lock(session_id):
            session = self._load(session_id)
            now = _now()
            answers: dict[str, dict] = {}
            questions: dict[str, dict] = {}
            span_ids: dict[AnswerSpan, str] = {}
            for i, span in enumerate(spans):
                aid = f"a{i}"
                span_ids[span] = aid
                answers[aid] = {**_span_dict(span),
                                "history": [{"text": span.surface,
                                             "timestamp": now}]}
            facet_docs = []
            qcounter = 0
            for facet in facets:
                members = []
                for member in facet.members:
                    qids = []
                    for q in member.questions:
                        qid = f"q{qcounter}"
                        qcounter += 1
                        questions[qid] = {
                            "tokens": q.tokens,
                            "beam_score": q.beam_score,
                            "intra_confidence": q.intra_confidence,
                            "truncated": q.truncated,
                            "attention": q.attention.tolist(),
                            "answer_id": span_ids[member.answer],
                            "history": [{"text": q.text, "timestamp": now}],
                        }
                        qids.append(qid)
                    members.append({
                        "answer_id": span_ids[member.answer],
                        "inter_confidence": member.inter_confidence,
                        "question_ids": qids,
                    })
                facet_docs.append({"stem": facet.stem,
                                   "inter_confidence": facet.inter_confidence,
                                   "members": members})
            session["selected_spans"] = [
                {"id": span_ids[s], **_span_dict(s)} for s in spans]
            session["answers"] = answers
            session["questions"] = questions
            session["facets"] = facet_docs
            session["filtered_out"] = filtered_out
            session["updated"] = now
            self.store.put(session_id, session)
            return session

    # ---- views ---------------------------------------------------------

    @staticmethod
    def _current_text(record: dict) -> str:
        return record["history"][-1]["text"]

    def facet_view(self, session: dict,
                   intra: float | None = None,
                   inter: float | None = None) -> list[dict]:
        """Knob-filtered view of stored facets; never mutates the session."""
        intra = session["knobs"]["intra"] if intra is None else intra
        inter = session["knobs"]["inter"] if inter is None else inter
        view = []
        for facet in session["facets"]:
            members = []
            for member in facet["members"]:
                if member["inter_confidence"] < inter:
                    continue
                answer = session["answers"][member["answer_id"]]
                questions = []
                for qid in member["question_ids"]:
                    q = session["questions"][qid]
                    if q["intra_confidence"] < intra:
                        continue
                    questions.append({
                        "id": qid,
                        "text": self._current_text(q),
                        "tokens": q["tokens"],
                        "intra_confidence": q["intra_confidence"],
                        "beam_score": q["beam_score"],
                        "truncated": q["truncated"],
                    })
                if questions:
                    members.append({
                        "answer": {"id": member["answer_id"],
                                   "text": self._current_text(answer),
                                   "start": answer["start"],
                                   "end": answer["end"],
                                   "source": answer["source"]},
                        "inter_confidence": member["inter_confidence"],
                        "questions": questions,
                    })
            if members:
                view.append({
                    "stem": facet["stem"],
                    "inter_confidence": max(m["inter_confidence"]
                                            for m in members),
                    "members": members,
                })
        return view

    def set_knobs(self, session_id: str, intra: float, inter: float) -> dict:
        if not (0.0 <= intra <= 1.0 and 0.0 <= inter <= 1.0):
            raise ValueError("knob values must be in [0, 1]")
        with self._lock(session_id):
            session = self._load(session_id)
            session["knobs"] = {"intra": intra, "inter": inter}
            session["updated"] = _now()
            self.store.put(session_id, session)
            return session

    # ---- edits ---------------------------------------------------------

    def edit_record(self, session_id: str, collection: str, record_id: str,
                    text: str) -> list[dict]:
        if not text or not text.strip():
            raise EmptyInput("edited text is empty")
        with self._lock(session_id):
            session = self._load(session_id)
            records = session[collection]
            if record_id not in records:
                raise SessionNotFound(f"{collection[:-1]} {record_id}")
            records[record_id]["history"].append(
                {"text": text, "timestamp": _now()})
            session["updated"] = _now()
            self.store.put(session_id, session)
            return records[record_id]["history"]

    def history(self, session_id: str, collection: str,
                record_id: str) -> list[dict]:
        session = self._load(session_id)
        records = session[collection]
        if record_id not in records:
            raise SessionNotFound(f"{collection[:-1]} {record_id}")
        return records[record_id]["history"]

    def attention(self, session_id: str, question_id: str) -> dict:
        session = self._load(session_id)
        q = session["questions"].get(question_id)
        if q is None:
            raise SessionNotFound(f"question {question_id}")
        return {
            "matrix": q["attention"],
            "row_labels": q["tokens"],
            "col_labels": session["paragraph"]["tokens"],
        }

    # ---- export --------------------------------------------------------

    def export(self, session_id: str, fmt: str) -> dict | str:
        session = self._load(session_id)
        facets = self.facet_view(session)
        if fmt == "json":
            out_facets = []
            for facet in facets:
                members = []
                for member in facet["members"]:
                    aid = member["answer"]["id"]
                    answer_doc = session["answers"][aid]
                    members.append({
                        "answer": {
                            "text": member["answer"]["text"],
                            "start": member["answer"]["start"],
                            "end": member["answer"]["end"],
                            "source": member["answer"]["source"],
                        },
                        "questions": [{
                            "text": q["text"],
                            "intra_confidence": q["intra_confidence"],
                            "beam_score": q["beam_score"],
                            "history": session["questions"][q["id"]]["history"],
                        } for q in member["questions"]],
                    })
                    members[-1]["answer_history"] = answer_doc["history"]
                out_facets.append({
                    "stem": facet["stem"],
                    "inter_confidence": facet["inter_confidence"],
                    "members": members,
                })
            return {
                "paragraph": session["text"],
                "generated_at": _now(),
                "facets": out_facets,
            }
        if fmt == "text":
            blocks = []
            for facet in facets:
                for member in facet["members"]:
                    for q in member["questions"]:
                        blocks.append(f"Q: {q['text']}\n"
                                      f"A: {member['answer']['text']}\n")
            return "\n".join(blocks) + ("\n" if blocks else "")
        raise UnknownFormat(f"unknown export format {fmt!r}")
