"""Beam-search decoding with attention-matrix capture.

Hypothesis scores are raw sums of emitted-token log-probabilities (the
beam score handed to the confidence sigmoid); optional length
normalization only reranks the final list. Since extending a hypothesis
can only lower its raw score, alive hypotheses that already score below
the kept finished set are pruned without losing the argmax.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .qg_model import DecoderState, EncodedParagraph, GeneratedQuestion, QGModel
from .vocab import EOS_ID, PAD_ID, SOS_ID, UNK_ID


@dataclass
class _Hypothesis:
    token_ids: list[int]          # emitted extended ids, EOS included if ended
    logprob: float
    state: DecoderState
    attn_rows: list[np.ndarray]


def _resolve(hyp: _Hypothesis, encoded: EncodedParagraph,
             ended: bool) -> GeneratedQuestion:
    visible = hyp.token_ids[:-1] if ended else hyp.token_ids
    rows = hyp.attn_rows[:len(visible)]
    tokens: list[str] = []
    for step, tid in enumerate(visible):
        if tid == UNK_ID:
            # emitted unknown: fall back to the most-attended source token
            src_pos = int(np.argmax(rows[step]))
            tokens.append(encoded.source.tokens[src_pos])
        else:
            tokens.append(encoded.dyndict.resolve(tid))
    src_len = encoded.token_states.shape[0]
    attention = (np.stack(rows) if rows
                 else np.zeros((0, src_len), dtype=np.float64))
    return GeneratedQuestion(tokens=tokens, beam_score=hyp.logprob,
                             attention=attention, truncated=not ended)


def beam_search(model: QGModel, encoded: EncodedParagraph,
                beam_width: int | None = None,
                max_decode_len: int | None = None,
                length_normalize: bool | None = None) -> list[GeneratedQuestion]:
    """Up to beam_width completed hypotheses, best beam score first.

    If nothing terminates within max_decode_len, the best partial
    hypothesis is returned with truncated=True.
    """
    cfg = model.config
    beam_width = cfg.beam_width if beam_width is None else beam_width
    max_decode_len = cfg.max_decode_len if max_decode_len is None else max_decode_len
    length_normalize = (cfg.length_normalize if length_normalize is None
                        else length_normalize)
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")

    model.eval()
    alive = [_Hypothesis([], 0.0, encoded.initial_state, [])]
    finished: list[_Hypothesis] = []

    with torch.no_grad():
        for _ in range(max_decode_len):
            candidates: list[_Hypothesis] = []
            for hyp in alive:
                prev = hyp.token_ids[-1] if hyp.token_ids else SOS_ID
                state, dist, attn = model.decode_step(hyp.state, prev, encoded)
                probs = dist.double().numpy()
                with np.errstate(divide="ignore"):
                    logp = np.where(probs > 0.0, np.log(probs), -np.inf)
                logp[PAD_ID] = -np.inf
                logp[SOS_ID] = -np.inf
                k = min(beam_width, int(np.isfinite(logp).sum()))
                if k == 0:
                    continue
                top = np.argpartition(-logp, k - 1)[:k]
                row = attn.double().numpy()
                for tid in top:
                    candidates.append(_Hypothesis(
                        token_ids=hyp.token_ids + [int(tid)],
                        logprob=hyp.logprob + float(logp[tid]),
                        state=state,
                        attn_rows=hyp.attn_rows + [row],
                    ))
            candidates.sort(key=lambda h: h.logprob, reverse=True)
            alive = []
            for cand in candidates[:beam_width]:
                if cand.token_ids[-1] == EOS_ID:
                    finished.append(cand)
                else:
                    alive.append(cand)
            if len(finished) >= beam_width:
                bar = sorted(finished, key=lambda h: h.logprob,
                             reverse=True)[beam_width - 1].logprob
                alive = [h for h in alive if h.logprob > bar]
            if not alive:
                break

    if not finished:
        if not alive:
            return []
        best = max(alive, key=lambda h: h.logprob)
        return [_resolve(best, encoded, ended=False)]

    questions = [_resolve(h, encoded, ended=True) for h in finished]
    if length_normalize:
        questions.sort(key=lambda q: q.beam_score / max(1, len(q.tokens) + 1),
                       reverse=True)
    else:
        questions.sort(key=lambda q: q.beam_score, reverse=True)
    return questions[:beam_width]
