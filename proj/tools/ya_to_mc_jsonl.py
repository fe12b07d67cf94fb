#!/usr/bin/env python3
"""Convert a locally obtained Yahoo! Answers dump to the mc_jsonl format.

The corpus is not redistributable, so this repository ships the converter
instead of the data. Input is expected as JSON lines with at least:

    {"id": ..., "question": ..., "answers": [...], "best_answer_index": ...}

Questions with fewer than --min-candidates answers are dropped (the filtered
corpus used for reported results keeps questions with at least 4 candidate
answers; averages about 9). Output lines are mc_jsonl records:

    {"id": ..., "question": ..., "candidates": [...], "gold_index": ...}
"""

import argparse
import json
import sys


def main():
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("input", help="raw Yahoo! Answers JSONL export")
    parser.add_argument("output", help="mc_jsonl file to write")
    parser.add_argument("--min-candidates", type=int, default=4)
    args = parser.parse_args()

    kept = 0
    dropped = 0
    with open(args.input, encoding="utf-8") as fin, open(args.output, "w",
                                                         encoding="utf-8") as fout:
        for line_no, line in enumerate(fin, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            answers = row["answers"]
            gold = int(row["best_answer_index"])
            if len(answers) < args.min_candidates:
                dropped += 1
                continue
            if not 0 <= gold < len(answers):
                raise SystemExit(f"line {line_no}: best_answer_index {gold} out of range")
            record = {
                "id": str(row["id"]),
                "question": row["question"],
                "candidates": answers,
                "gold_index": gold,
            }
            fout.write(json.dumps(record, ensure_ascii=False) + "\n")
            kept += 1
    print(f"kept {kept} questions, dropped {dropped} with fewer than "
          f"{args.min_candidates} candidates", file=sys.stderr)


if __name__ == "__main__":
    main()
