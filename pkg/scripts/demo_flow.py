#!/usr/bin/env python3
"""Drive the four-stage flow in process and print what the UI would show.

Needs the toy checkpoints from train_toy_models.py.
"""

import argparse

from pivotqg.annotators import HeuristicAnnotator
from pivotqg.answerability import load_filter_checkpoint
from pivotqg.qg_train import load_checkpoint
from pivotqg.sessions import SessionManager
from pivotqg.store import SessionStore

TEXT = "w01 w02 zxaaa w03 switching w04 switches w05"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qg-ckpt", default="artifacts/qg.pt")
    parser.add_argument("--filter-ckpt", default=None)
    parser.add_argument("--text", default=TEXT)
    args = parser.parse_args()

    filter_model, threshold = (None, 0.0)
    if args.filter_ckpt:
        filter_model, threshold = load_filter_checkpoint(args.filter_ckpt)
        threshold = threshold if threshold is not None else 0.0

    manager = SessionManager(
        store=SessionStore(":memory:"),
        annotator=HeuristicAnnotator(),
        qg_model=load_checkpoint(args.qg_ckpt),
        filter_model=filter_model,
        filter_threshold=threshold,
        beam_width=3,
    )

    session = manager.create(args.text)
    sid = session["id"]
    print(f"session {sid}: {len(session['flags'])} review flags")

    spans = []
    for surface in ("zxaaa", "switching", "switches"):
        if surface in args.text:
            start = args.text.index(surface)
            spans.append({"start": start, "end": start + len(surface)})
    session = manager.generate(sid, spans)

    for facet in manager.facet_view(session):
        print(f"\nfacet [{facet['stem']}]  "
              f"inter={facet['inter_confidence']:.3f}")
        for member in facet["members"]:
            print(f"  answer: {member['answer']['text']!r} "
                  f"(inter={member['inter_confidence']:.3f})")
            for q in member["questions"]:
                print(f"    {q['text']!r}  intra={q['intra_confidence']:.3f} "
                      f"beam={q['beam_score']:.3f}")
                attention = manager.attention(sid, q["id"])
                row = attention["matrix"][0] if attention["matrix"] else []
                if row:
                    top = max(range(len(row)), key=row.__getitem__)
                    print(f"    first-token attention peaks at "
                          f"{attention['col_labels'][top]!r}")
    if session["filtered_out"]:
        print(f"\nfiltered out as unanswerable: {len(session['filtered_out'])}")
    print("\ntext export:\n" + manager.export(sid, "text"))


if __name__ == "__main__":
    main()
