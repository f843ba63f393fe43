"""Dataclass configs with the published training defaults.

Generator defaults: 2-layer bidirectional encoder / 1-layer decoder of
hidden size 600, 300-dim frozen embeddings, dropout 0.3, SGD at 0.1 with
annealing, 20 epochs, batch 64. Filter defaults: 3 epochs, lr 3e-5,
batch 12.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


@dataclass
class QGConfig:
    embedding_dim: int = 300
    encoder_layers: int = 2
    decoder_layers: int = 1
    hidden_size: int = 600
    dropout: float = 0.3
    learning_rate: float = 0.1
    epochs: int = 20
    batch_size: int = 64
    beam_width: int = 10
    max_decode_len: int = 30
    vocab_size: int = 20000
    embeddings_frozen: bool = True
    # answer-tag feature channel concatenated to token embeddings
    tag_embedding_dim: int = 16
    # optional extra linguistic feature channels (POS/NER ids), off by default
    use_linguistic_features: bool = False
    linguistic_feature_dim: int = 16
    max_src_len: int = 400
    # learning-rate annealing: multiply by lr_decay each epoch from
    # start_decay_epoch on, and whenever the epoch loss fails to improve
    lr_decay: float = 0.5
    start_decay_epoch: int = 9
    grad_clip: float = 5.0
    # beam scores are raw log-prob sums unless this is switched on
    length_normalize: bool = False
    embeddings_path: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        for name in ("embedding_dim", "encoder_layers", "decoder_layers",
                     "hidden_size", "epochs", "batch_size", "beam_width",
                     "max_decode_len", "vocab_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.hidden_size % 2 != 0:
            raise ValueError("hidden_size must be even (bidirectional encoder)")


@dataclass
class FilterConfig:
    epochs: int = 3
    learning_rate: float = 3e-5
    batch_size: int = 12
    hidden_size: int = 768
    num_layers: int = 2
    num_heads: int = 4
    max_seq_len: int = 384
    max_span_len: int = 30
    dropout: float = 0.1

    def __post_init__(self) -> None:
        if self.epochs <= 0 or self.batch_size <= 0:
            raise ValueError("epochs and batch_size must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.hidden_size % self.num_heads != 0:
            raise ValueError("hidden_size must be divisible by num_heads")


@dataclass
class ServiceConfig:
    qg_checkpoint: str | None = None
    filter_checkpoint: str | None = None
    filter_threshold: float = 0.0
    annotator_url: str | None = None
    beam_width: int | None = None
    intra_threshold: float = 0.0
    inter_threshold: float = 0.0
    db_path: str = "sessions.db"
    static_dir: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000

    def __post_init__(self) -> None:
        if not 0.0 <= self.intra_threshold <= 1.0:
            raise ValueError("intra_threshold must be in [0, 1]")
        if not 0.0 <= self.inter_threshold <= 1.0:
            raise ValueError("inter_threshold must be in [0, 1]")


_ENV_PREFIX = "PIVOTQG_"


def _coerce(raw: str, target_type: Any) -> Any:
    if target_type is bool:
        return raw.lower() in ("1", "true", "yes", "on")
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    return raw


def load_config(cls, path: str | Path | None = None, env: bool = False):
    """Build a config dataclass from an optional JSON file.

    Unknown keys are rejected. With env=True, PIVOTQG_<FIELD> environment
    variables override file values (service deployments).
    """
    values: dict[str, Any] = {}
    if path is not None:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    if env:
        for f in dataclasses.fields(cls):
            raw = os.environ.get(_ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            base = f.type
            hint = {"int": int, "float": float, "bool": bool}.get(
                str(base).replace(" | None", ""), str)
            values[f.name] = _coerce(raw, hint)
    return cls(**values)


def config_to_dict(cfg) -> dict[str, Any]:
    return dataclasses.asdict(cfg)
