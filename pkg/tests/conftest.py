import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pivotqg.answer_candidates import BioTaggedInput
from pivotqg.answerability import FilterExample
from pivotqg.config import QGConfig
from pivotqg.qg_train import QGExample


def make_copy_task(n: int, seed: int = 7,
                   n_fillers: int = 40) -> list[QGExample]:
    """Synthetic copy task: the target question embeds the BIO-marked span
    in a fixed template; span tokens are out-of-vocabulary by design."""
    rng = random.Random(seed)
    fillers = [f"w{i:02d}" for i in range(n_fillers)]
    examples = []
    for _ in range(n):
        length = rng.randint(6, 10)
        tokens = [rng.choice(fillers) for _ in range(length)]
        entity = "zx" + "".join(rng.choice("abcdefghij") for _ in range(3))
        pos = rng.randrange(length)
        tokens.insert(pos, entity)
        tags = ["O"] * len(tokens)
        tags[pos] = "B"
        examples.append(QGExample(
            source=BioTaggedInput(tokens, tags),
            target=["what", "is", entity, "?"],
        ))
    return examples


def make_answerability_task(n_train: int, n_val: int, seed: int = 3):
    """Keyword-determined answerability: a question about keyword k is
    answerable iff k occurs in the paragraph."""
    rng = random.Random(seed)
    fillers = [f"f{i:02d}" for i in range(30)]
    keywords = ["kiwi", "lemon", "mango", "grape", "melon"]

    def make(answerable: bool) -> FilterExample:
        length = rng.randint(7, 11)
        para = [rng.choice(fillers) for _ in range(length)]
        kw = rng.choice(keywords)
        if answerable:
            pos = rng.randrange(length)
            para.insert(pos, kw)
            answer = (pos, pos)
        else:
            answer = None
            if rng.random() < 0.5:
                other = rng.choice([k for k in keywords if k != kw])
                para.insert(rng.randrange(length), other)
        return FilterExample(["where", "is", kw, "?"], para, answer)

    train = [make(i % 2 == 0) for i in range(n_train)]
    val = [make(i % 2 == 0) for i in range(n_val)]
    return train, val


def toy_qg_config(**overrides) -> QGConfig:
    base = dict(embedding_dim=32, hidden_size=32, encoder_layers=1,
                decoder_layers=1, dropout=0.0, learning_rate=0.5,
                epochs=12, batch_size=16, vocab_size=50, beam_width=3,
                max_decode_len=8, start_decay_epoch=10, tag_embedding_dim=8)
    base.update(overrides)
    return QGConfig(**base)


@pytest.fixture(scope="session")
def trained_copy_model():
    """A generator trained on the copy task; reused across tests."""
    from pivotqg.qg_train import train

    data = make_copy_task(400, seed=7)
    result = train(data, toy_qg_config(), seed=1)
    return result.model


@pytest.fixture(scope="session")
def trained_copy_ckpt(trained_copy_model, tmp_path_factory):
    from pivotqg.qg_train import save_checkpoint

    path = tmp_path_factory.mktemp("ckpt") / "copy-task.pt"
    save_checkpoint(trained_copy_model, path)
    return path
