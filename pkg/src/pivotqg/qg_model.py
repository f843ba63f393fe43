"""Question generator: recurrent encoder, copy decoder, sparsemax attention.

The encoder is a stacked bidirectional LSTM over token embeddings
concatenated with an answer-tag feature embedding; its final states form
a single fixed-length summary vector that seeds the decoder. Each decode
step attends over the encoder states with sparsemax, mixes a generate
distribution over the fixed vocabulary with a copy distribution over
source positions via a learned gate, and emits over the extended
(fixed + dynamic) vocabulary. The same attention row drives both the
context vector and the copy distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn as nn

from .answer_candidates import AnswerSpan, BioTaggedInput, encode_bio
from .config import QGConfig
from .errors import SequenceTooLong
from .sparsemax import sparsemax_torch
from .text_review import Paragraph
from .vocab import DynamicDictionary, PAD_ID, UNK_ID, Vocabulary

TAG_IDS = {"O": 0, "B": 1, "I": 2}
_TAG_PAD = 3

_MASK_SCORE = -1e9  # pad positions; large-negative keeps sparsemax finite


@dataclass
class DecoderState:
    h: torch.Tensor        # [layers, batch, hidden]
    c: torch.Tensor        # [layers, batch, hidden]
    context: torch.Tensor  # [batch, hidden] input-feed vector


@dataclass
class EncodedParagraph:
    token_states: torch.Tensor  # [src_len, hidden]
    summary: torch.Tensor       # [hidden]
    source: BioTaggedInput
    dyndict: DynamicDictionary
    initial_state: DecoderState


@dataclass
class GeneratedQuestion:
    tokens: list[str]
    beam_score: float          # sum of emitted-token log-probs, <= 0
    attention: np.ndarray      # [question_len, src_len], sparsemax rows
    answer: AnswerSpan | None = None
    intra_confidence: float | None = None
    truncated: bool = False

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


class QGModel(nn.Module):
    def __init__(self, config: QGConfig, vocab: Vocabulary):
        super().__init__()
        self.config = config
        self.vocab = vocab
        h = config.hidden_size

        self.embedding = nn.Embedding(vocab.size, config.embedding_dim,
                                      padding_idx=PAD_ID)
        self.tag_embedding = nn.Embedding(4, config.tag_embedding_dim,
                                          padding_idx=_TAG_PAD)
        enc_in = config.embedding_dim + config.tag_embedding_dim
        if config.use_linguistic_features:
            enc_in += config.linguistic_feature_dim
            self.feature_embedding = nn.Embedding(
                64, config.linguistic_feature_dim, padding_idx=0)
        self.encoder = nn.LSTM(
            enc_in, h // 2, num_layers=config.encoder_layers,
            bidirectional=True, batch_first=True,
            dropout=config.dropout if config.encoder_layers > 1 else 0.0)
        self.bridge_h = nn.Linear(h, h * config.decoder_layers)
        self.bridge_c = nn.Linear(h, h * config.decoder_layers)

        cells = [nn.LSTMCell(config.embedding_dim + h, h)]
        cells += [nn.LSTMCell(h, h) for _ in range(config.decoder_layers - 1)]
        self.decoder_cells = nn.ModuleList(cells)

        self.attn_bilinear = nn.Linear(h, h, bias=False)
        self.readout = nn.Linear(2 * h, h)
        self.out_proj = nn.Linear(h, vocab.size)
        self.gate_proj = nn.Linear(2 * h + config.embedding_dim, 1)
        self.dropout = nn.Dropout(config.dropout)

    # ---- shared embedding helpers -------------------------------------

    def load_pretrained_embeddings(self, path: str) -> int:
        """Load token vectors from a word2vec-style text file; freeze them.

        Lines are `token v1 ... vd`. Returns the number of vocabulary
        tokens that received a pretrained vector.
        """
        loaded = 0
        with torch.no_grad():
            with open(path, encoding="utf-8") as f:
                for line in f:
                    parts = line.rstrip("\n").split(" ")
                    if len(parts) != self.config.embedding_dim + 1:
                        continue
                    tok = parts[0]
                    if tok not in self.vocab:
                        continue
                    vec = torch.tensor([float(x) for x in parts[1:]])
                    self.embedding.weight[self.vocab.lookup(tok)] = vec
                    loaded += 1
        if self.config.embeddings_frozen:
            self.embedding.weight.requires_grad_(False)
        return loaded

    def _numericalize(self, tagged: BioTaggedInput) -> tuple[torch.Tensor, torch.Tensor]:
        ids = torch.tensor([self.vocab.lookup(t) for t in tagged.tokens],
                           dtype=torch.long)
        tags = torch.tensor([TAG_IDS[t] for t in tagged.tags], dtype=torch.long)
        return ids, tags

    # ---- batched core ---------------------------------------------------

    def encode_batch(self, token_ids: torch.Tensor, tag_ids: torch.Tensor,
                     lengths: torch.Tensor,
                     feature_ids: torch.Tensor | None = None):
        """token_ids/tag_ids: [batch, src_len]; lengths: [batch]."""
        channels = [self.embedding(token_ids), self.tag_embedding(tag_ids)]
        if self.config.use_linguistic_features:
            if feature_ids is None:
                feature_ids = torch.zeros_like(token_ids)
            channels.append(self.feature_embedding(feature_ids))
        emb = torch.cat(channels, dim=-1)
        packed = nn.utils.rnn.pack_padded_sequence(
            emb, lengths.cpu(), batch_first=True, enforce_sorted=False)
        out_packed, (h_n, _) = self.encoder(packed)
        enc_out, _ = nn.utils.rnn.pad_packed_sequence(
            out_packed, batch_first=True, total_length=token_ids.shape[1])
        # final layer's fwd/bwd states -> the fixed-length paragraph summary
        summary = torch.cat([h_n[-2], h_n[-1]], dim=-1)
        batch = token_ids.shape[0]
        layers = self.config.decoder_layers
        h0 = torch.tanh(self.bridge_h(summary)).view(batch, layers, -1)
        c0 = torch.tanh(self.bridge_c(summary)).view(batch, layers, -1)
        state = DecoderState(h=h0.transpose(0, 1).contiguous(),
                             c=c0.transpose(0, 1).contiguous(),
                             context=torch.zeros_like(summary))
        return enc_out, summary, state

    def decode_step_batch(self, prev_ext_ids: torch.Tensor,
                          state: DecoderState, enc_out: torch.Tensor,
                          src_mask: torch.Tensor,
                          src_ext_ids: torch.Tensor, extended_size: int,
                          gate_override: float | None = None):
        """One decoder step over a batch.

        prev_ext_ids: [batch] extended-vocabulary ids of the previous
        tokens (dynamic ids are embedded as the unknown token);
        src_mask: [batch, src_len] True at real positions;
        src_ext_ids: [batch, src_len] extended ids of each source token.
        Returns (next_state, dist [batch, extended_size], attn [batch, src_len]).
        """
        prev_fixed = torch.where(prev_ext_ids < self.vocab.size,
                                 prev_ext_ids,
                                 torch.full_like(prev_ext_ids, UNK_ID))
        prev_emb = self.embedding(prev_fixed)
        x = torch.cat([prev_emb, state.context], dim=-1)

        hs, cs = [], []
        inp = x
        for li, cell in enumerate(self.decoder_cells):
            h_i, c_i = cell(inp, (state.h[li], state.c[li]))
            hs.append(h_i)
            cs.append(c_i)
            inp = self.dropout(h_i) if li < len(self.decoder_cells) - 1 else h_i
        top_h = hs[-1]

        scores = torch.bmm(enc_out, self.attn_bilinear(top_h).unsqueeze(-1)).squeeze(-1)
        scores = scores.masked_fill(~src_mask, _MASK_SCORE)
        attn = sparsemax_torch(scores)
        context = torch.bmm(attn.unsqueeze(1), enc_out).squeeze(1)

        readout = torch.tanh(self.readout(torch.cat([top_h, context], dim=-1)))
        gen_dist = torch.softmax(self.out_proj(self.dropout(readout)), dim=-1)
        gate = torch.sigmoid(
            self.gate_proj(torch.cat([top_h, context, prev_emb], dim=-1)))
        if gate_override is not None:
            gate = torch.full_like(gate, gate_override)

        batch = prev_ext_ids.shape[0]
        dist = enc_out.new_zeros((batch, extended_size))
        dist[:, :self.vocab.size] = gate * gen_dist
        copy_mass = (1.0 - gate) * attn * src_mask
        dist.scatter_add_(1, src_ext_ids, copy_mass)

        next_state = DecoderState(h=torch.stack(hs), c=torch.stack(cs),
                                  context=context)
        return next_state, dist, attn

    # ---- single-example interface --------------------------------------

    def encode(self, tagged: BioTaggedInput) -> EncodedParagraph:
        """Encode one BIO-tagged source sequence (inference-friendly)."""
        if len(tagged.tokens) > self.config.max_src_len:
            raise SequenceTooLong(
                f"{len(tagged.tokens)} tokens exceeds max_src_len "
                f"{self.config.max_src_len}")
        ids, tags = self._numericalize(tagged)
        with torch.no_grad():
            enc_out, summary, state = self.encode_batch(
                ids.unsqueeze(0), tags.unsqueeze(0),
                torch.tensor([len(tagged.tokens)]))
        return EncodedParagraph(
            token_states=enc_out[0],
            summary=summary[0],
            source=tagged,
            dyndict=DynamicDictionary(self.vocab, tagged.tokens),
            initial_state=state,
        )

    def decode_step(self, state: DecoderState, prev_token_index: int,
                    encoded: EncodedParagraph,
                    gate_override: float | None = None):
        """Single-example decode step over the extended vocabulary."""
        src_len = encoded.token_states.shape[0]
        src_ext = torch.tensor([encoded.dyndict.source_extended_ids],
                               dtype=torch.long)
        mask = torch.ones((1, src_len), dtype=torch.bool)
        with torch.no_grad():
            next_state, dist, attn = self.decode_step_batch(
                torch.tensor([prev_token_index], dtype=torch.long), state,
                encoded.token_states.unsqueeze(0), mask, src_ext,
                encoded.dyndict.extended_size, gate_override=gate_override)
        return next_state, dist[0], attn[0]


def generate_questions(paragraph: Paragraph, spans: list[AnswerSpan],
                       model: QGModel,
                       beam_width: int | None = None) -> dict[AnswerSpan, list[GeneratedQuestion]]:
    """Run the full per-span pipeline: BIO encode, encode, beam search.

    Spans are processed independently; the result maps each span to its
    ranked question list.
    """
    from .beam_search import beam_search  # local import avoids a cycle

    results: dict[AnswerSpan, list[GeneratedQuestion]] = {}
    model.eval()
    for span in spans:
        tagged = encode_bio(paragraph, span)
        with torch.no_grad():
            encoded = model.encode(tagged)
            questions = beam_search(model, encoded, beam_width=beam_width)
        for q in questions:
            q.answer = span
        results[span] = questions
    return results
