"""Command-line entry points: training, generation, calibration, serving."""

from __future__ import annotations

import argparse
import json
import sys

from .config import FilterConfig, QGConfig, ServiceConfig, load_config


def _cmd_train_qg(args: argparse.Namespace) -> int:
    from .qg_train import load_qg_dataset, save_checkpoint, train

    config = load_config(QGConfig, args.config)
    dataset = load_qg_dataset(args.data)
    print(f"training generator on {len(dataset)} examples "
          f"({config.epochs} epochs, batch {config.batch_size})")
    result = train(dataset, config, seed=args.seed, log_every=1)
    save_checkpoint(result.model, args.out)
    print(f"saved checkpoint to {args.out} "
          f"(final loss {result.epoch_losses[-1]:.4f})")
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    from .answer_candidates import validate_custom_span
    from .qg_model import generate_questions
    from .qg_train import load_checkpoint
    from .scoring import group_by_stem
    from .text_review import tokenize

    model = load_checkpoint(args.ckpt)
    with open(args.text, encoding="utf-8") as f:
        text = f.read().strip()
    paragraph = tokenize(text)
    spans = []
    for part in args.answers.split(","):
        start, end = part.split(":")
        spans.append(validate_custom_span(paragraph, (int(start), int(end))))
    results = generate_questions(paragraph, spans, model,
                                 beam_width=args.beam_width)
    facets = group_by_stem(results)
    out = [{
        "stem": f.stem,
        "inter_confidence": f.inter_confidence,
        "members": [{
            "answer": m.answer.surface,
            "questions": [{"text": q.text,
                           "beam_score": q.beam_score,
                           "intra_confidence": q.intra_confidence}
                          for q in m.questions],
        } for m in f.members],
    } for f in facets]
    json.dump(out, sys.stdout, indent=2)
    print()
    return 0


def _cmd_train_filter(args: argparse.Namespace) -> int:
    from .answerability import (calibrate_threshold, finetune_filter,
                                load_squad2_dataset, save_filter_checkpoint,
                                verdict_diffs)

    config = load_config(FilterConfig, args.config)
    dataset = load_squad2_dataset(args.data)
    print(f"fine-tuning filter on {len(dataset)} examples "
          f"({config.epochs} epochs, lr {config.learning_rate}, "
          f"batch {config.batch_size})")
    model = finetune_filter(dataset, config, seed=args.seed, log_every=1)
    threshold = None
    if args.validation:
        val = load_squad2_dataset(args.validation)
        cal = calibrate_threshold(verdict_diffs(model, val))
        threshold = cal.threshold
        print(f"calibrated V = {cal.threshold:.6g} "
              f"(validation accuracy {cal.accuracy:.3f})")
    save_filter_checkpoint(model, args.out, threshold=threshold)
    print(f"saved checkpoint to {args.out}")
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    from .answerability import (calibrate_threshold, load_filter_checkpoint,
                                load_squad2_dataset, verdict_diffs)

    model, _ = load_filter_checkpoint(args.ckpt)
    val = load_squad2_dataset(args.validation)
    cal = calibrate_threshold(verdict_diffs(model, val))
    print(cal.threshold)
    if cal.degenerate:
        print("warning: single-class validation set; "
              "threshold is degenerate", file=sys.stderr)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(ServiceConfig, args.config, env=True)
    if args.port is not None:
        config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pivotqg",
        description="answer-pivoted question generation workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-qg", help="train the question generator")
    p.add_argument("--data", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train_qg)

    p = sub.add_parser("generate", help="generate questions for answer spans")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--text", required=True, help="file with the paragraph")
    p.add_argument("--answers", required=True,
                   help="comma-separated char offsets, e.g. 19:24,28:32")
    p.add_argument("--beam-width", type=int, default=None)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("train-filter", help="fine-tune the answerability filter")
    p.add_argument("--data", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--validation", default=None,
                   help="optional validation set for threshold calibration")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train_filter)

    p = sub.add_parser("calibrate-threshold",
                       help="calibrate V on a validation set; prints V")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--validation", required=True)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("serve", help="run the REST service")
    p.add_argument("--config", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
