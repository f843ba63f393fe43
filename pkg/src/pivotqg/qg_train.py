"""Training loop, dataset loading, and checkpoint I/O for the generator.

Optimization is plain SGD with annealing: the learning rate is halved
from start_decay_epoch on, and additionally whenever an epoch fails to
improve the loss. Targets are supervised over the extended distribution,
so a target token that only exists in the source trains the copy gate.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

import torch
import torch.nn as nn

from .answer_candidates import BioTaggedInput, encode_bio, validate_custom_span
from .beam_search import beam_search
from .config import QGConfig, config_to_dict
from .errors import DivergedLoss, EmptyDataset, EmptySpan, RangeOutOfBounds
from .qg_model import QGModel, TAG_IDS, _TAG_PAD
from .text_review import tokenize
from .vocab import DynamicDictionary, EOS_ID, PAD_ID, SOS_ID, Vocabulary

CHECKPOINT_FORMAT = "pivotqg-qg/1"


@dataclass
class QGExample:
    source: BioTaggedInput
    target: list[str]  # question tokens, no SOS/EOS


@dataclass
class TrainResult:
    model: QGModel
    epoch_losses: list[float] = field(default_factory=list)


def load_qg_dataset(path: str | Path) -> list[QGExample]:
    """SQuAD-style JSON (nested `data` layout or a flat example list)."""
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    raw: list[tuple[str, str, str, int]] = []
    if isinstance(data, dict) and "data" in data:
        for article in data["data"]:
            for para in article.get("paragraphs", []):
                context = para["context"]
                for qa in para.get("qas", []):
                    if not qa.get("answers"):
                        continue
                    ans = qa["answers"][0]
                    raw.append((context, qa["question"],
                                ans["text"], ans["answer_start"]))
    elif isinstance(data, list):
        for ex in data:
            context = ex.get("context") or ex.get("paragraph")
            raw.append((context, ex["question"],
                        ex["answer_text"], ex["answer_start"]))
    else:
        raise ValueError("unrecognized dataset layout")

    examples: list[QGExample] = []
    for context, question, answer_text, answer_start in raw:
        paragraph = tokenize(context)
        char_range = (answer_start, answer_start + len(answer_text))
        try:
            span = validate_custom_span(paragraph, char_range)
        except (RangeOutOfBounds, EmptySpan):
            continue  # unusable annotation
        examples.append(QGExample(
            source=encode_bio(paragraph, span),
            target=tokenize(question).tokens,
        ))
    return examples


def build_vocab(examples: list[QGExample], max_size: int) -> Vocabulary:
    seqs = [ex.source.tokens for ex in examples] + [ex.target for ex in examples]
    return Vocabulary.build(seqs, max_size)


def _batch_tensors(batch: list[QGExample], vocab: Vocabulary):
    """Pad a batch and wire up the extended-vocabulary supervision."""
    src_lens = [len(ex.source.tokens) for ex in batch]
    tgt_lens = [len(ex.target) + 1 for ex in batch]  # EOS appended
    max_src, max_tgt = max(src_lens), max(tgt_lens)
    bsz = len(batch)

    src_ids = torch.full((bsz, max_src), PAD_ID, dtype=torch.long)
    tag_ids = torch.full((bsz, max_src), _TAG_PAD, dtype=torch.long)
    src_ext_ids = torch.full((bsz, max_src), PAD_ID, dtype=torch.long)
    src_mask = torch.zeros((bsz, max_src), dtype=torch.bool)
    dyndicts = [DynamicDictionary(vocab, ex.source.tokens) for ex in batch]
    ext_size = max(d.extended_size for d in dyndicts)

    prev_ids = torch.full((bsz, max_tgt), PAD_ID, dtype=torch.long)
    gold_ids = torch.full((bsz, max_tgt), PAD_ID, dtype=torch.long)
    tgt_mask = torch.zeros((bsz, max_tgt), dtype=torch.bool)

    for i, (ex, dyn) in enumerate(zip(batch, dyndicts)):
        L = src_lens[i]
        src_ids[i, :L] = torch.tensor([vocab.lookup(t) for t in ex.source.tokens])
        tag_ids[i, :L] = torch.tensor([TAG_IDS[t] for t in ex.source.tags])
        src_ext_ids[i, :L] = torch.tensor(dyn.source_extended_ids)
        src_mask[i, :L] = True

        gold = [dyn.extended_lookup(t) for t in ex.target] + [EOS_ID]
        prev = [SOS_ID] + gold[:-1]
        T = len(gold)
        gold_ids[i, :T] = torch.tensor(gold)
        prev_ids[i, :T] = torch.tensor(prev)
        tgt_mask[i, :T] = True

    lengths = torch.tensor(src_lens)
    return (src_ids, tag_ids, lengths, src_ext_ids, src_mask, ext_size,
            prev_ids, gold_ids, tgt_mask)


def batch_loss(model: QGModel, batch: list[QGExample]) -> tuple[torch.Tensor, int]:
    """Mean negative log-likelihood per target token, and the token count."""
    (src_ids, tag_ids, lengths, src_ext_ids, src_mask, ext_size,
     prev_ids, gold_ids, tgt_mask) = _batch_tensors(batch, model.vocab)

    enc_out, _, state = model.encode_batch(src_ids, tag_ids, lengths)
    total = torch.zeros((), dtype=torch.float32)
    n_tokens = int(tgt_mask.sum())
    for t in range(prev_ids.shape[1]):
        state, dist, _ = model.decode_step_batch(
            prev_ids[:, t], state, enc_out, src_mask, src_ext_ids, ext_size)
        p = dist.gather(1, gold_ids[:, t:t + 1]).squeeze(1)
        step_nll = -torch.log(p.clamp_min(1e-12))
        total = total + (step_nll * tgt_mask[:, t]).sum()
    return total / n_tokens, n_tokens


def train(dataset: list[QGExample], config: QGConfig,
          vocab: Vocabulary | None = None, seed: int = 0,
          log_every: int = 0) -> TrainResult:
    """Fit a generator on (BIO-tagged source, question tokens) pairs."""
    if not dataset:
        raise EmptyDataset("no training examples")
    torch.manual_seed(seed)
    rng = random.Random(seed)

    if vocab is None:
        vocab = build_vocab(dataset, config.vocab_size)
    model = QGModel(config, vocab)
    if config.embeddings_path:
        model.load_pretrained_embeddings(config.embeddings_path)

    params = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.SGD(params, lr=config.learning_rate)
    lr = config.learning_rate

    epoch_losses: list[float] = []
    order = list(range(len(dataset)))
    for epoch in range(config.epochs):
        model.train()
        rng.shuffle(order)
        loss_sum, tok_sum = 0.0, 0
        for i in range(0, len(order), config.batch_size):
            batch = [dataset[j] for j in order[i:i + config.batch_size]]
            optimizer.zero_grad()
            loss, n_tok = batch_loss(model, batch)
            if not torch.isfinite(loss):
                raise DivergedLoss(f"non-finite loss at epoch {epoch}")
            loss.backward()
            nn.utils.clip_grad_norm_(params, config.grad_clip)
            optimizer.step()
            loss_sum += float(loss.detach()) * n_tok
            tok_sum += n_tok
        epoch_loss = loss_sum / tok_sum
        worse = len(epoch_losses) > 0 and epoch_loss > epoch_losses[-1]
        epoch_losses.append(epoch_loss)
        if log_every and (epoch + 1) % log_every == 0:
            print(f"epoch {epoch + 1}/{config.epochs} "
                  f"loss {epoch_loss:.4f} lr {lr:.4g}")
        if epoch + 2 > config.start_decay_epoch or worse:
            lr *= config.lr_decay
            for group in optimizer.param_groups:
                group["lr"] = lr
    return TrainResult(model=model, epoch_losses=epoch_losses)


def token_accuracy(model: QGModel, examples: list[QGExample]) -> float:
    """Greedy-decode accuracy: per-position matches over max(gold, predicted)."""
    correct = 0
    total = 0
    model.eval()
    for ex in examples:
        encoded = model.encode(ex.source)
        out = beam_search(model, encoded, beam_width=1)
        pred = out[0].tokens if out else []
        total += max(len(ex.target), len(pred))
        correct += sum(1 for a, b in zip(pred, ex.target) if a == b)
    return correct / total if total else 0.0


def save_checkpoint(model: QGModel, path: str | Path) -> None:
    torch.save({
        "format": CHECKPOINT_FORMAT,
        "config": config_to_dict(model.config),
        "vocab": model.vocab.id_to_token[4:],
        "state_dict": model.state_dict(),
    }, path)


def load_checkpoint(path: str | Path) -> QGModel:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"unsupported checkpoint format {payload.get('format')!r}")
    config = QGConfig(**payload["config"])
    vocab = Vocabulary(payload["vocab"])
    model = QGModel(config, vocab)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model
