import numpy as np
import pytest
import torch

from conftest import toy_qg_config
from pivotqg.answer_candidates import BioTaggedInput
from pivotqg.errors import SequenceTooLong
from pivotqg.qg_model import QGModel
from pivotqg.qg_train import QGExample, batch_loss
from pivotqg.vocab import (DynamicDictionary, EOS_ID, PAD_ID, SOS_ID, UNK_ID,
                           Vocabulary)


def make_model(seed=0, **overrides):
    torch.manual_seed(seed)
    vocab = Vocabulary([f"w{i:02d}" for i in range(20)] + ["what", "is", "?"])
    model = QGModel(toy_qg_config(**overrides), vocab)
    model.eval()
    return model


def tagged_input(tokens, b_at=0, i_until=None):
    tags = ["O"] * len(tokens)
    tags[b_at] = "B"
    if i_until is not None:
        for i in range(b_at + 1, i_until + 1):
            tags[i] = "I"
    return BioTaggedInput(list(tokens), tags)


class TestVocabulary:
    def test_reserved_indices(self):
        v = Vocabulary(["alpha"])
        assert (PAD_ID, UNK_ID, SOS_ID, EOS_ID) == (0, 1, 2, 3)
        assert v.lookup("alpha") == 4
        assert v.lookup("missing") == UNK_ID

    def test_build_ranks_by_frequency(self):
        v = Vocabulary.build([["b", "a", "a"], ["a", "c", "b"]], max_size=6)
        assert v.lookup("a") == 4
        assert v.lookup("b") == 5

    def test_dynamic_ids_are_disjoint_and_cover_oov_only(self):
        v = Vocabulary(["known"])
        dyn = DynamicDictionary(v, ["known", "nov1", "nov2", "nov1"])
        assert dyn.extra_tokens == ["nov1", "nov2"]
        assert dyn.extended_lookup("nov1") == v.size
        assert dyn.extended_lookup("nov2") == v.size + 1
        assert dyn.extended_lookup("known") == v.lookup("known")
        assert dyn.extended_lookup("absent") == UNK_ID
        assert dyn.resolve(v.size) == "nov1"
        assert dyn.source_extended_ids == [v.lookup("known"), v.size,
                                           v.size + 1, v.size]


class TestEncode:
    def test_shapes_match_contract(self):
        model = make_model()
        enc = model.encode(tagged_input(["w00", "w01", "w02", "w03", "w04", "w05"]))
        assert enc.token_states.shape == (6, model.config.hidden_size)
        assert enc.summary.shape == (model.config.hidden_size,)

    def test_deterministic_in_eval_mode(self):
        model = make_model()
        t = tagged_input(["w00", "w01", "w02"])
        with torch.no_grad():
            a = model.encode(t).token_states
            b = model.encode(t).token_states
        assert torch.equal(a, b)

    def test_token_order_matters(self):
        model = make_model()
        with torch.no_grad():
            a = model.encode(tagged_input(["w00", "w01", "w02"])).token_states
            b = model.encode(tagged_input(["w01", "w00", "w02"])).token_states
        assert not torch.allclose(a, b)

    def test_answer_tags_change_encoding(self):
        model = make_model()
        tokens = ["w00", "w01", "w02"]
        with torch.no_grad():
            a = model.encode(tagged_input(tokens, b_at=0)).token_states
            b = model.encode(tagged_input(tokens, b_at=2)).token_states
        assert not torch.allclose(a, b)

    def test_too_long_input_rejected(self):
        model = make_model(max_src_len=4)
        with pytest.raises(SequenceTooLong):
            model.encode(tagged_input(["w00"] * 5))


class TestDecodeStep:
    def test_distribution_sums_to_one(self):
        model = make_model()
        enc = model.encode(tagged_input(["w00", "oov1", "w02"]))
        _, dist, attn = model.decode_step(enc.initial_state, SOS_ID, enc)
        assert dist.shape == (enc.dyndict.extended_size,)
        assert abs(float(dist.sum()) - 1.0) < 1e-6
        assert abs(float(attn.sum()) - 1.0) < 1e-6
        assert (dist >= 0).all()

    def test_copy_only_limit(self):
        model = make_model()
        enc = model.encode(tagged_input(["w00", "oov1", "w02"]))
        _, dist, _ = model.decode_step(enc.initial_state, SOS_ID, enc,
                                       gate_override=0.0)
        src_ids = set(enc.dyndict.source_extended_ids)
        off_source = [i for i in range(enc.dyndict.extended_size)
                      if i not in src_ids]
        assert float(dist[off_source].sum()) == 0.0
        assert abs(float(dist.sum()) - 1.0) < 1e-6

    def test_generate_only_limit(self):
        model = make_model()
        enc = model.encode(tagged_input(["w00", "oov1", "w02"]))
        _, dist, _ = model.decode_step(enc.initial_state, SOS_ID, enc,
                                       gate_override=1.0)
        assert float(dist[model.vocab.size:].sum()) == 0.0
        assert abs(float(dist.sum()) - 1.0) < 1e-6

    def test_valid_probability_vector_over_many_random_models(self):
        # 10 000 decode steps across random parameterizations
        total = 0
        for seed in range(20):
            model = make_model(seed=seed)
            torch.manual_seed(seed + 1000)
            bsz, src_len = 500, 6
            token_ids = torch.randint(4, model.vocab.size, (bsz, src_len))
            tag_ids = torch.randint(0, 3, (bsz, src_len))
            lengths = torch.full((bsz,), src_len)
            enc_out, _, state = model.encode_batch(token_ids, tag_ids, lengths)
            mask = torch.ones((bsz, src_len), dtype=torch.bool)
            prev = torch.randint(4, model.vocab.size, (bsz,))
            with torch.no_grad():
                _, dist, attn = model.decode_step_batch(
                    prev, state, enc_out, mask, token_ids, model.vocab.size)
            assert (dist >= 0).all()
            assert (dist.sum(dim=-1) - 1.0).abs().max() < 1e-6
            assert (attn.sum(dim=-1) - 1.0).abs().max() < 1e-6
            total += bsz
        assert total == 10_000


class TestGradients:
    def test_full_step_loss_matches_finite_differences(self):
        # float64 end to end so central differences resolve at 1e-3
        torch.manual_seed(5)
        model = make_model(seed=5).double()
        model.train()
        example = QGExample(tagged_input(["w00", "oov1", "w02", "w03"], b_at=1),
                            ["what", "is", "oov1", "?"])

        loss, _ = batch_loss(model, [example])
        params = dict(model.named_parameters())
        grads = torch.autograd.grad(loss, list(params.values()),
                                    allow_unused=True)
        checked = 0
        eps = 1e-6
        for (name, param), grad in zip(params.items(), grads):
            if grad is None:
                continue
            flat = param.detach().reshape(-1)
            idx = int(torch.argmax(grad.abs().reshape(-1)))
            analytic = float(grad.reshape(-1)[idx])
            if abs(analytic) < 1e-6:
                continue
            with torch.no_grad():
                orig = float(flat[idx])
                flat[idx] = orig + eps
                up, _ = batch_loss(model, [example])
                flat[idx] = orig - eps
                down, _ = batch_loss(model, [example])
                flat[idx] = orig
            fd = (float(up) - float(down)) / (2 * eps)
            assert abs(analytic - fd) / max(abs(analytic), 1e-8) < 1e-3, name
            checked += 1
        assert checked >= 5
