"""Fixed vocabulary plus per-example dynamic dictionaries.

The dynamic dictionary extends the fixed token set with the source-only
tokens of one example, giving the copy pathway somewhere to put its
probability mass. Fixed and dynamic index ranges are disjoint: dynamic
ids start at the fixed vocabulary size.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable

PAD, UNK, SOS, EOS = "<pad>", "<unk>", "<s>", "</s>"
PAD_ID, UNK_ID, SOS_ID, EOS_ID = 0, 1, 2, 3
_SPECIALS = [PAD, UNK, SOS, EOS]


class Vocabulary:
    def __init__(self, tokens: Iterable[str]):
        self.id_to_token: list[str] = list(_SPECIALS)
        for tok in tokens:
            if tok in _SPECIALS:
                continue
            self.id_to_token.append(tok)
        self.token_to_id = {t: i for i, t in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise ValueError("duplicate tokens in vocabulary")

    @classmethod
    def build(cls, token_seqs: Iterable[Iterable[str]],
              max_size: int) -> "Vocabulary":
        """Most frequent tokens first; ties broken lexicographically."""
        counts: Counter[str] = Counter()
        for seq in token_seqs:
            counts.update(seq)
        for sp in _SPECIALS:
            counts.pop(sp, None)
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        keep = max(0, max_size - len(_SPECIALS))
        return cls(tok for tok, _ in ranked[:keep])

    @property
    def size(self) -> int:
        return len(self.id_to_token)

    def lookup(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def token(self, idx: int) -> str:
        return self.id_to_token[idx]

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id


class DynamicDictionary:
    """Extension map from source-only tokens to temporary indices."""

    def __init__(self, vocab: Vocabulary, source_tokens: list[str]):
        self.vocab = vocab
        self.extra_tokens: list[str] = []
        extra_ids: dict[str, int] = {}
        for tok in source_tokens:
            if tok not in vocab and tok not in extra_ids:
                extra_ids[tok] = vocab.size + len(self.extra_tokens)
                self.extra_tokens.append(tok)
        self._extra_ids = extra_ids
        # source position -> extended-vocabulary index (copy targets)
        self.source_extended_ids: list[int] = [
            vocab.token_to_id[tok] if tok in vocab else extra_ids[tok]
            for tok in source_tokens
        ]

    @property
    def extended_size(self) -> int:
        return self.vocab.size + len(self.extra_tokens)

    def extended_lookup(self, token: str) -> int:
        """Fixed id if known, dynamic id if source-only, else unknown."""
        if token in self.vocab:
            return self.vocab.lookup(token)
        return self._extra_ids.get(token, UNK_ID)

    def resolve(self, idx: int) -> str:
        """Surface form of any extended-vocabulary index."""
        if idx < self.vocab.size:
            return self.vocab.token(idx)
        return self.extra_tokens[idx - self.vocab.size]
