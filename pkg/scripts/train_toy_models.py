#!/usr/bin/env python3
"""Train desk-scale checkpoints and emit a ready-to-serve config.

Produces artifacts/qg.pt, artifacts/filter.pt and artifacts/service.json;
afterwards `pivotqg serve --config artifacts/service.json` runs the full
workbench against them.
"""

import argparse
import json
from pathlib import Path

from pivotqg.answerability import (calibrate_threshold, finetune_filter,
                                   load_squad2_dataset,
                                   save_filter_checkpoint, verdict_diffs)
from pivotqg.config import FilterConfig, QGConfig
from pivotqg.qg_train import load_qg_dataset, save_checkpoint, train

# vocab 47 = specials + fillers + template; the entity pool stays OOV so
# questions about entities exercise the copy pathway
QG_TOY = dict(embedding_dim=32, hidden_size=32, encoder_layers=1,
              decoder_layers=1, dropout=0.0, learning_rate=0.5, epochs=12,
              batch_size=16, vocab_size=47, beam_width=5, max_decode_len=10,
              start_decay_epoch=10, tag_embedding_dim=8)

FILTER_TOY = dict(epochs=40, learning_rate=1e-3, batch_size=16,
                  hidden_size=96, num_layers=2, num_heads=4,
                  max_seq_len=64, max_span_len=5, dropout=0.1)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default="data")
    parser.add_argument("--out-dir", default="artifacts")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    data_dir = Path(args.data_dir)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    print("== generator ==")
    qg_data = load_qg_dataset(data_dir / "copy_task.json")
    result = train(qg_data, QGConfig(**QG_TOY), seed=args.seed, log_every=3)
    save_checkpoint(result.model, out / "qg.pt")
    print(f"saved {out / 'qg.pt'} (final loss {result.epoch_losses[-1]:.4f})")

    print("== filter ==")
    train_set = load_squad2_dataset(data_dir / "answerability_train.json")
    val_set = load_squad2_dataset(data_dir / "answerability_val.json")
    model = finetune_filter(train_set, FilterConfig(**FILTER_TOY),
                            seed=args.seed, log_every=5)
    calibration = calibrate_threshold(verdict_diffs(model, val_set))
    save_filter_checkpoint(model, out / "filter.pt",
                           threshold=calibration.threshold)
    print(f"saved {out / 'filter.pt'} "
          f"(V={calibration.threshold:.4g}, "
          f"val accuracy {calibration.accuracy:.3f})")

    service_config = {
        "qg_checkpoint": str(out / "qg.pt"),
        "filter_checkpoint": str(out / "filter.pt"),
        "db_path": str(out / "sessions.db"),
        "beam_width": 5,
        "static_dir": "frontend/dist",  # served when built; ignored if absent
    }
    (out / "service.json").write_text(json.dumps(service_config, indent=1))
    print(f"wrote {out / 'service.json'}; "
          f"run: pivotqg serve --config {out / 'service.json'}")


if __name__ == "__main__":
    main()
