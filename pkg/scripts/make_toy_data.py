#!/usr/bin/env python3
"""Write desk-scale synthetic datasets for the generator and the filter.

Both datasets share one vocabulary world (filler words plus a closed
pool of entity tokens) so the trained pair is coherent when served
together: the generator's copied questions are exactly the kind the
filter learned to judge. Entities stay out of the generator's fixed
vocabulary (they are rarer than every filler), so the copy mechanism is
still doing the work; the filter sees them in its vocabulary and judges
answerability by whether the asked-about entity occurs in the paragraph.
"""

import argparse
import json
import random
from pathlib import Path

FILLERS = [f"w{i:02d}" for i in range(40)]
ENTITY_POOL = ["zx" + "".join(c) for c in
               ["aaa", "bbb", "ccc", "ddd", "eee", "fff", "ggg", "hhh",
                "iii", "jjj", "kkk", "lll", "mmm", "nnn", "ooo", "ppp"]]


def copy_task_rows(n, rng):
    rows = []
    for _ in range(n):
        length = rng.randint(6, 10)
        tokens = [rng.choice(FILLERS) for _ in range(length)]
        entity = rng.choice(ENTITY_POOL)
        pos = rng.randrange(length)
        tokens.insert(pos, entity)
        context = " ".join(tokens)
        rows.append({
            "context": context,
            "question": f"what is {entity} ?",
            "answer_text": entity,
            "answer_start": context.index(entity),
        })
    return rows


def answerability_articles(n, rng):
    articles = []
    for i in range(n):
        answerable = i % 2 == 0
        length = rng.randint(7, 11)
        para = [rng.choice(FILLERS) for _ in range(length)]
        entity = rng.choice(ENTITY_POOL)
        answers = []
        if answerable:
            pos = rng.randrange(length)
            para.insert(pos, entity)
            context = " ".join(para)
            answers = [{"text": entity, "answer_start": context.index(entity)}]
        elif rng.random() < 0.5:
            para.insert(rng.randrange(length),
                        rng.choice([e for e in ENTITY_POOL if e != entity]))
        context = " ".join(para)
        articles.append({"paragraphs": [{"context": context, "qas": [{
            "id": f"syn{i}",
            "question": f"what is {entity} ?",
            "is_impossible": not answerable,
            "answers": answers,
        }]}]})
    return articles


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data")
    parser.add_argument("--copy-train", type=int, default=500)
    parser.add_argument("--filter-train", type=int, default=400)
    parser.add_argument("--filter-val", type=int, default=100)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    (out / "copy_task.json").write_text(
        json.dumps(copy_task_rows(args.copy_train, rng), indent=1))
    (out / "answerability_train.json").write_text(json.dumps(
        {"data": answerability_articles(args.filter_train, rng)}, indent=1))
    (out / "answerability_val.json").write_text(json.dumps(
        {"data": answerability_articles(args.filter_val,
                                        random.Random(args.seed + 1))},
        indent=1))
    print(f"wrote copy_task.json ({args.copy_train} rows), "
          f"answerability_train.json ({args.filter_train}), "
          f"answerability_val.json ({args.filter_val}) under {out}/")


if __name__ == "__main__":
    main()
