import json

import numpy as np
import pytest
import torch

from conftest import make_copy_task, toy_qg_config
from pivotqg.beam_search import beam_search
from pivotqg.errors import EmptyDataset
from pivotqg.qg_train import (load_checkpoint, load_qg_dataset,
                              save_checkpoint, token_accuracy, train)


class TestTrainingLoop:
    def test_single_example_memorization_monotone_after_warmup(self):
        data = make_copy_task(1, seed=11)
        cfg = toy_qg_config(epochs=50, batch_size=1, learning_rate=0.05,
                            start_decay_epoch=999)
        result = train(data, cfg, seed=2)
        losses = result.epoch_losses
        assert len(losses) == 50
        for prev, nxt in zip(losses[5:], losses[6:]):
            assert nxt <= prev + 1e-9
        assert losses[-1] < losses[0]

    def test_final_epoch_improves_on_first(self):
        data = make_copy_task(80, seed=12)
        result = train(data, toy_qg_config(epochs=4), seed=3)
        assert result.epoch_losses[-1] < result.epoch_losses[0]

    def test_empty_dataset_rejected(self):
        with pytest.raises(EmptyDataset):
            train([], toy_qg_config())

    def test_annealing_reduces_learning_rate(self):
        data = make_copy_task(20, seed=13)
        cfg = toy_qg_config(epochs=4, start_decay_epoch=2, lr_decay=0.5)
        # no assertion on loss: just verify the schedule runs end to end
        result = train(data, cfg, seed=4)
        assert len(result.epoch_losses) == 4


class TestCopyTask:
    def test_oov_tokens_are_copied(self, trained_copy_model):
        heldout = make_copy_task(20, seed=99)
        hits = 0
        for ex in heldout:
            entity = ex.target[2]
            assert entity not in trained_copy_model.vocab  # OOV by design
            encoded = trained_copy_model.encode(ex.source)
            out = beam_search(trained_copy_model, encoded, beam_width=1)
            if out and entity in out[0].tokens:
                hits += 1
        assert hits >= 18

    def test_token_accuracy_on_heldout(self, trained_copy_model):
        heldout = make_copy_task(40, seed=98)
        assert token_accuracy(trained_copy_model, heldout) >= 0.9

    def test_copied_token_attends_to_its_source_position(self, trained_copy_model):
        heldout = make_copy_task(25, seed=97)
        checked = 0
        for ex in heldout:
            entity = ex.target[2]
            encoded = trained_copy_model.encode(ex.source)
            out = beam_search(trained_copy_model, encoded, beam_width=1)
            if not out or entity not in out[0].tokens:
                continue
            row = out[0].attention[out[0].tokens.index(entity)]
            src_pos = ex.source.tokens.index(entity)
            assert int(np.argmax(row)) == src_pos
            checked += 1
        assert checked >= 20


class TestCheckpoint:
    def test_round_trip_preserves_generation(self, trained_copy_model, tmp_path):
        path = tmp_path / "model.pt"
        save_checkpoint(trained_copy_model, path)
        restored = load_checkpoint(path)
        ex = make_copy_task(1, seed=55)[0]
        a = beam_search(trained_copy_model,
                        trained_copy_model.encode(ex.source), beam_width=2)
        b = beam_search(restored, restored.encode(ex.source), beam_width=2)
        assert [q.tokens for q in a] == [q.tokens for q in b]
        assert [q.beam_score for q in a] == pytest.approx(
            [q.beam_score for q in b], abs=1e-9)

    def test_format_tag_is_checked(self, tmp_path):
        path = tmp_path / "bogus.pt"
        torch.save({"format": "something-else"}, path)
        with pytest.raises(ValueError):
            load_checkpoint(path)


class TestDatasetLoading:
    def test_nested_squad_layout(self, tmp_path):
        doc = {"data": [{"paragraphs": [{
            "context": "Gandhi was born in India in 1869.",
            "qas": [{"question": "When was Gandhi born?",
                     "id": "q1",
                     "answers": [{"text": "1869", "answer_start": 28}]}],
        }]}]}
        path = tmp_path / "squad.json"
        path.write_text(json.dumps(doc))
        examples = load_qg_dataset(path)
        assert len(examples) == 1
        assert examples[0].source.tags[6] == "B"
        assert examples[0].target == ["When", "was", "Gandhi", "born", "?"]

    def test_flat_layout(self, tmp_path):
        doc = [{"context": "The lab opened in 1909.",
                "question": "When did the lab open?",
                "answer_text": "1909", "answer_start": 18}]
        path = tmp_path / "flat.json"
        path.write_text(json.dumps(doc))
        examples = load_qg_dataset(path)
        assert len(examples) == 1
        assert examples[0].source.tokens[4] == "1909"

    def test_unusable_offsets_skipped(self, tmp_path):
        doc = [{"context": "short text", "question": "why?",
                "answer_text": "zzz", "answer_start": 5000}]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        assert load_qg_dataset(path) == []


class TestPretrainedEmbeddings:
    def test_vectors_loaded_and_frozen(self, tmp_path):
        import torch

        from conftest import toy_qg_config
        from pivotqg.qg_model import QGModel
        from pivotqg.vocab import Vocabulary

        vocab = Vocabulary(["alpha", "beta"])
        dim = 8
        path = tmp_path / "vectors.txt"
        alpha_vec = [0.5] * dim
        lines = ["alpha " + " ".join(str(v) for v in alpha_vec),
                 "unrelated " + " ".join("0.1" for _ in range(dim))]
        path.write_text("\n".join(lines))

        model = QGModel(toy_qg_config(embedding_dim=dim, hidden_size=16,
                                      tag_embedding_dim=4), vocab)
        loaded = model.load_pretrained_embeddings(str(path))
        assert loaded == 1  # only tokens in the vocabulary count
        got = model.embedding.weight[vocab.lookup("alpha")]
        assert torch.equal(got, torch.tensor(alpha_vec))
        assert model.embedding.weight.requires_grad is False

    def test_random_fallback_stays_trainable(self):
        from conftest import toy_qg_config
        from pivotqg.qg_model import QGModel
        from pivotqg.vocab import Vocabulary

        model = QGModel(toy_qg_config(), Vocabulary(["alpha"]))
        assert model.embedding.weight.requires_grad is True


class TestGenerateQuestions:
    def test_spans_are_processed_independently(self, trained_copy_model):
        from pivotqg.answer_candidates import validate_custom_span
        from pivotqg.qg_model import generate_questions
        from pivotqg.text_review import tokenize

        text = "w01 w02 zxaaa w03 w04 zxbbb w05"
        paragraph = tokenize(text)
        spans = [
            validate_custom_span(paragraph, (8, 13)),    # zxaaa
            validate_custom_span(paragraph, (22, 27)),   # zxbbb
        ]
        together = generate_questions(paragraph, spans, trained_copy_model,
                                      beam_width=2)
        for span in spans:
            alone = generate_questions(paragraph, [span], trained_copy_model,
                                       beam_width=2)
            assert [q.tokens for q in together[span]] == \
                [q.tokens for q in alone[span]]

    def test_different_answers_yield_different_questions(self,
                                                         trained_copy_model):
        from pivotqg.answer_candidates import validate_custom_span
        from pivotqg.qg_model import generate_questions
        from pivotqg.text_review import tokenize

        text = "w01 w02 zxaaa w03 w04 zxbbb w05"
        paragraph = tokenize(text)
        spans = [
            validate_custom_span(paragraph, (8, 13)),
            validate_custom_span(paragraph, (22, 27)),
        ]
        results = generate_questions(paragraph, spans, trained_copy_model,
                                     beam_width=1)
        assert results[spans[0]][0].tokens != results[spans[1]][0].tokens

    def test_zero_spans_give_empty_map(self, trained_copy_model):
        from pivotqg.qg_model import generate_questions
        from pivotqg.text_review import tokenize

        paragraph = tokenize("w01 w02 w03")
        assert generate_questions(paragraph, [], trained_copy_model) == {}
