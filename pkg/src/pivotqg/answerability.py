"""Answerability filtering via span scoring over a packed sequence.

A question and its paragraph are packed into one token sequence
([CLS] question [SEP] paragraph [SEP]); a bidirectional encoder produces
hidden vectors, and learned start/end vectors score candidate answer
spans. The no-answer score is taken at [CLS]. A question counts as
unanswerable when the no-answer score beats the best paragraph span by
more than a threshold calibrated on validation data.

The encoder is pluggable: production can point at a pretrained
transformer with the same (ids, segments, mask) -> hidden interface;
tests and desk-scale runs use the small trainable encoder defined here.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn

from .answer_candidates import validate_custom_span
from .config import FilterConfig, config_to_dict
from .errors import EmptyDataset, EmptySpan, QuestionTooLong, RangeOutOfBounds
from .text_review import tokenize

CLS, SEP = "[CLS]", "[SEP]"
PAD, UNK = "[PAD]", "[UNK]"
_SPECIALS = [PAD, UNK, CLS, SEP]

FILTER_CHECKPOINT_FORMAT = "pivotqg-filter/1"


@dataclass
class PackedSequence:
    tokens: list[str]
    segment_ids: list[int]
    paragraph_token_index_map: dict[int, int]  # packed idx -> paragraph idx


@dataclass
class FilterVerdict:
    s_null: float
    s_best: float
    best_span: tuple[int, int] | None  # packed indices, j >= i
    threshold: float | None = None
    answerable: bool | None = None


def pack(question_tokens: list[str], paragraph_tokens: list[str],
         max_len: int) -> PackedSequence:
    """[CLS] question [SEP] paragraph [SEP], paragraph-side truncation only."""
    if not question_tokens or not paragraph_tokens:
        raise ValueError("question and paragraph token lists must be non-empty")
    if len(question_tokens) > max_len - 3:
        raise QuestionTooLong(
            f"question of {len(question_tokens)} tokens cannot fit in {max_len}")
    room = max_len - 3 - len(question_tokens)
    kept = paragraph_tokens[:room]
    tokens = [CLS] + list(question_tokens) + [SEP] + kept + [SEP]
    segment_ids = [0] * (len(question_tokens) + 2) + [1] * (len(kept) + 1)
    first_para = len(question_tokens) + 2
    index_map = {first_para + i: i for i in range(len(kept))}
    return PackedSequence(tokens=tokens, segment_ids=segment_ids,
                          paragraph_token_index_map=index_map)


def score_spans(hidden: np.ndarray, start_vec: np.ndarray,
                end_vec: np.ndarray, paragraph_positions: list[int],
                max_span_len: int) -> FilterVerdict:
    """Null score at [CLS] vs the best paragraph span score.

    Candidate spans are pairs of paragraph-side packed positions (i, j)
    with j >= i and length capped at max_span_len; the reported best span
    is the lexicographically first maximizer.
    """
    start_scores = hidden @ np.asarray(start_vec, dtype=np.float64)
    end_scores = hidden @ np.asarray(end_vec, dtype=np.float64)
    s_null = float(start_scores[0] + end_scores[0])

    pos = sorted(paragraph_positions)
    if not pos:
        return FilterVerdict(s_null=s_null, s_best=float("-inf"),
                             best_span=None)
    pos_arr = np.asarray(pos)
    grid = start_scores[pos_arr][:, None] + end_scores[pos_arr][None, :]
    ii = np.arange(len(pos))
    valid = (ii[None, :] >= ii[:, None]) & (ii[None, :] - ii[:, None] < max_span_len)
    grid = np.where(valid, grid, -np.inf)
    flat = int(np.argmax(grid))
    bi, bj = divmod(flat, len(pos))
    return FilterVerdict(s_null=s_null, s_best=float(grid[bi, bj]),
                         best_span=(int(pos_arr[bi]), int(pos_arr[bj])))


class ToyTextEncoder(nn.Module):
    """Small trainable transformer encoder with the pluggable interface."""

    def __init__(self, token_to_id: dict[str, int], config: FilterConfig):
        super().__init__()
        self.token_to_id = dict(token_to_id)
        self.config = config
        d = config.hidden_size
        self.hidden_size = d
        self.tok_embedding = nn.Embedding(len(token_to_id), d, padding_idx=0)
        self.pos_embedding = nn.Embedding(config.max_seq_len, d)
        self.seg_embedding = nn.Embedding(2, d)
        layer = nn.TransformerEncoderLayer(
            d_model=d, nhead=config.num_heads, dim_feedforward=2 * d,
            dropout=config.dropout, batch_first=True)
        self.layers = nn.TransformerEncoder(layer, num_layers=config.num_layers,
                                            enable_nested_tensor=False)

    def ids_for(self, tokens: list[str]) -> list[int]:
        unk = self.token_to_id[UNK]
        return [self.token_to_id.get(t, unk) for t in tokens]

    def forward(self, token_ids: torch.Tensor, segment_ids: torch.Tensor,
                pad_mask: torch.Tensor) -> torch.Tensor:
        """[batch, len] ids/segments, pad_mask True at real positions."""
        positions = torch.arange(token_ids.shape[1], device=token_ids.device)
        x = (self.tok_embedding(token_ids)
             + self.pos_embedding(positions)[None, :, :]
             + self.seg_embedding(segment_ids))
        return self.layers(x, src_key_padding_mask=~pad_mask)


class SpanScoringModel(nn.Module):
    """Encoder plus the start/end scoring vectors."""

    def __init__(self, encoder: nn.Module):
        super().__init__()
        self.encoder = encoder
        h = encoder.hidden_size
        self.start_vector = nn.Parameter(torch.randn(h) * 0.02)
        self.end_vector = nn.Parameter(torch.randn(h) * 0.02)

    @property
    def max_seq_len(self) -> int:
        return self.encoder.config.max_seq_len

    def hidden_states(self, packed: PackedSequence) -> np.ndarray:
        self.eval()
        ids = torch.tensor([self.encoder.ids_for(packed.tokens)])
        segs = torch.tensor([packed.segment_ids])
        mask = torch.ones_like(ids, dtype=torch.bool)
        with torch.no_grad():
            hidden = self.encoder(ids, segs, mask)[0]
        return hidden.double().numpy()


def score(packed: PackedSequence, model: SpanScoringModel,
          max_span_len: int | None = None) -> FilterVerdict:
    """Raw verdict (no threshold applied) for one packed sequence."""
    if max_span_len is None:
        max_span_len = model.encoder.config.max_span_len
    hidden = model.hidden_states(packed)
    return score_spans(
        hidden,
        model.start_vector.detach().double().numpy(),
        model.end_vector.detach().double().numpy(),
        sorted(packed.paragraph_token_index_map),
        max_span_len,
    )


@dataclass
class CalibrationResult:
    threshold: float
    accuracy: float
    degenerate: bool = False


def calibrate_threshold(validation: list[tuple[float, bool]]) -> CalibrationResult:
    """Threshold V for the rule "unanswerable iff (s_null - s_best) > V".

    Input pairs are (score difference, answerable label). Returns the
    accuracy-maximizing V, chosen as the midpoint of the best separating
    interval; ties go to the smallest candidate. A single-class input is
    degenerate: all-answerable yields +inf, all-unanswerable -inf.
    """
    if not validation:
        raise EmptyDataset("empty validation set")
    labels = {ans for _, ans in validation}
    if labels == {True}:
        return CalibrationResult(float("inf"), 1.0, degenerate=True)
    if labels == {False}:
        return CalibrationResult(float("-inf"), 1.0, degenerate=True)

    diffs = sorted({d for d, _ in validation})
    candidates = [diffs[0] - 1.0]
    candidates += [(a + b) / 2.0 for a, b in zip(diffs, diffs[1:])]
    candidates.append(diffs[-1] + 1.0)

    best_v, best_acc = candidates[0], -1.0
    for v in candidates:
        correct = sum(1 for d, ans in validation if (d <= v) == ans)
        acc = correct / len(validation)
        if acc > best_acc:
            best_v, best_acc = v, acc
    return CalibrationResult(best_v, best_acc)


def is_answerable(question_tokens: list[str], paragraph_tokens: list[str],
                  model: SpanScoringModel, threshold: float,
                  max_len: int | None = None) -> FilterVerdict:
    """Apply the calibrated rule; a diff exactly at V counts answerable."""
    packed = pack(question_tokens, paragraph_tokens,
                  max_len or model.max_seq_len)
    verdict = score(packed, model)
    verdict.threshold = threshold
    verdict.answerable = (verdict.s_null - verdict.s_best) <= threshold
    return verdict


# ---- fine-tuning ---------------------------------------------------------

@dataclass
class FilterExample:
    question_tokens: list[str]
    paragraph_tokens: list[str]
    # paragraph token range of the gold answer; None when unanswerable
    answer_range: tuple[int, int] | None


def load_squad2_dataset(path: str | Path) -> list[FilterExample]:
    """SQuAD-2.0-style JSON with `is_impossible` flags."""
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    examples: list[FilterExample] = []
    for article in data["data"]:
        for para in article.get("paragraphs", []):
            paragraph = tokenize(para["context"])
            for qa in para.get("qas", []):
                question = tokenize(qa["question"]).tokens
                if qa.get("is_impossible"):
                    examples.append(FilterExample(question, paragraph.tokens, None))
                    continue
                if not qa.get("answers"):
                    continue
                ans = qa["answers"][0]
                char_range = (ans["answer_start"],
                              ans["answer_start"] + len(ans["text"]))
                try:
                    span = validate_custom_span(paragraph, char_range)
                except (RangeOutOfBounds, EmptySpan):
                    continue
                examples.append(FilterExample(question, paragraph.tokens,
                                              span.token_range))
    return examples


def build_filter_vocab(examples: list[FilterExample]) -> dict[str, int]:
    counts: Counter[str] = Counter()
    for ex in examples:
        counts.update(ex.question_tokens)
        counts.update(ex.paragraph_tokens)
    vocab = {tok: i for i, tok in enumerate(_SPECIALS)}
    for tok, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        if tok not in vocab:
            vocab[tok] = len(vocab)
    return vocab


def _gold_packed_indices(packed: PackedSequence,
                         answer_range: tuple[int, int] | None) -> tuple[int, int]:
    """Packed (start, end) supervision; [CLS]=(0,0) for no-answer."""
    if answer_range is None:
        return 0, 0
    inverse = {v: k for k, v in packed.paragraph_token_index_map.items()}
    first, last = answer_range
    if first not in inverse or last not in inverse:
        return 0, 0  # answer truncated away; supervise as no-answer
    return inverse[first], inverse[last]


def finetune_filter(dataset: list[FilterExample], config: FilterConfig,
                    seed: int = 0, log_every: int = 0) -> SpanScoringModel:
    """Train the span scorer: cross-entropy on start and end indices.

    Unanswerable examples supervise both indices at the [CLS] position.
    """
    if not dataset:
        raise EmptyDataset("no filter training examples")
    torch.manual_seed(seed)
    vocab = build_filter_vocab(dataset)
    model = SpanScoringModel(ToyTextEncoder(vocab, config))
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)

    packed_all = [pack(ex.question_tokens, ex.paragraph_tokens,
                       config.max_seq_len) for ex in dataset]
    golds = [_gold_packed_indices(p, ex.answer_range)
             for p, ex in zip(packed_all, dataset)]

    order = np.arange(len(dataset))
    rng = np.random.default_rng(seed)
    for epoch in range(config.epochs):
        model.train()
        rng.shuffle(order)
        epoch_loss, n_batches = 0.0, 0
        for i in range(0, len(order), config.batch_size):
            idx = order[i:i + config.batch_size]
            loss = _filter_batch_loss(model, [packed_all[j] for j in idx],
                                      [golds[j] for j in idx])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach())
            n_batches += 1
        if log_every and (epoch + 1) % log_every == 0:
            print(f"filter epoch {epoch + 1}/{config.epochs} "
                  f"loss {epoch_loss / n_batches:.4f}")
    model.eval()
    return model


def _filter_batch_loss(model: SpanScoringModel, packed: list[PackedSequence],
                       golds: list[tuple[int, int]]) -> torch.Tensor:
    max_len = max(len(p.tokens) for p in packed)
    bsz = len(packed)
    ids = torch.zeros((bsz, max_len), dtype=torch.long)
    segs = torch.zeros((bsz, max_len), dtype=torch.long)
    mask = torch.zeros((bsz, max_len), dtype=torch.bool)
    for i, p in enumerate(packed):
        L = len(p.tokens)
        ids[i, :L] = torch.tensor(model.encoder.ids_for(p.tokens))
        segs[i, :L] = torch.tensor(p.segment_ids)
        mask[i, :L] = True
    hidden = model.encoder(ids, segs, mask)
    start_logits = hidden @ model.start_vector
    end_logits = hidden @ model.end_vector
    neg = torch.finfo(start_logits.dtype).min
    start_logits = start_logits.masked_fill(~mask, neg)
    end_logits = end_logits.masked_fill(~mask, neg)
    gold_start = torch.tensor([g[0] for g in golds])
    gold_end = torch.tensor([g[1] for g in golds])
    return (nn.functional.cross_entropy(start_logits, gold_start)
            + nn.functional.cross_entropy(end_logits, gold_end))


def filter_accuracy(model: SpanScoringModel, dataset: list[FilterExample],
                    threshold: float) -> float:
    """Verdict accuracy against the answerable/unanswerable labels."""
    correct = 0
    for ex in dataset:
        verdict = is_answerable(ex.question_tokens, ex.paragraph_tokens,
                                model, threshold)
        if verdict.answerable == (ex.answer_range is not None):
            correct += 1
    return correct / len(dataset)


def verdict_diffs(model: SpanScoringModel,
                  dataset: list[FilterExample]) -> list[tuple[float, bool]]:
    """(s_null - s_best, answerable label) pairs for calibration."""
    out = []
    for ex in dataset:
        packed = pack(ex.question_tokens, ex.paragraph_tokens,
                      model.max_seq_len)
        v = score(packed, model)
        out.append((v.s_null - v.s_best, ex.answer_range is not None))
    return out


def save_filter_checkpoint(model: SpanScoringModel, path: str | Path,
                           threshold: float | None = None) -> None:
    torch.save({
        "format": FILTER_CHECKPOINT_FORMAT,
        "config": config_to_dict(model.encoder.config),
        "vocab": model.encoder.token_to_id,
        "state_dict": model.state_dict(),
        "threshold": threshold,
    }, path)


def load_filter_checkpoint(path: str | Path) -> tuple[SpanScoringModel, float | None]:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    if payload.get("format") != FILTER_CHECKPOINT_FORMAT:
        raise ValueError(f"unsupported checkpoint format {payload.get('format')!r}")
    config = FilterConfig(**payload["config"])
    model = SpanScoringModel(ToyTextEncoder(payload["vocab"], config))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, payload.get("threshold")
