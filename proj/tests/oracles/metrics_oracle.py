#!/usr/bin/env python3
# Copyright 2026 The svaicl Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Brute-force metric values for the committed confusion-matrix fixtures.

Each matrix is expanded back into individual (truth, prediction) pairs and
the measures are evaluated from those pairs. An Invalid answer is a
prediction of None. Writes ../fixtures/confusion.json; with --check, also
compares the Invalid-free cases against scikit-learn.
"""

import json
import math
import sys
from pathlib import Path

LEVELS = ["Critical", "High", "Medium", "Low"]
OUT = Path(__file__).resolve().parents[1] / "fixtures" / "confusion.json"

CASES = {
    "diagonal_5432": {
        "counts": [[5, 1, 0, 0],
                   [2, 4, 1, 0],
                   [0, 1, 3, 2],
                   [0, 0, 1, 2]],
        "invalid": [0, 0, 0, 0],
    },
    "diagonal_5432_with_invalid": {
        "counts": [[5, 1, 0, 0],
                   [2, 4, 1, 0],
                   [0, 1, 3, 2],
                   [0, 0, 1, 2]],
        "invalid": [1, 0, 2, 1],
    },
    "constant_predictor": {
        "counts": [[5, 0, 0, 0],
                   [0, 0, 0, 0],
                   [0, 0, 0, 0],
                   [5, 0, 0, 0]],
        "invalid": [0, 0, 0, 0],
    },
    "perfect": {
        "counts": [[3, 0, 0, 0],
                   [0, 2, 0, 0],
                   [0, 0, 4, 0],
                   [0, 0, 0, 1]],
        "invalid": [0, 0, 0, 0],
    },
    "single_class_truth": {
        "counts": [[0, 0, 0, 0],
                   [0, 0, 0, 0],
                   [0, 0, 0, 0],
                   [1, 2, 0, 3]],
        "invalid": [0, 0, 0, 1],
    },
}


def expand(case):
    pairs = []
    for t, row in enumerate(case["counts"]):
        for p, n in enumerate(row):
            pairs += [(LEVELS[t], LEVELS[p])] * n
        pairs += [(LEVELS[t], None)] * case["invalid"][t]
    return pairs


def measures(pairs):
    s = len(pairs)
    c = sum(1 for t, p in pairs if t == p)
    f1s = []
    for k in LEVELS:
        tp = sum(1 for t, p in pairs if t == k and p == k)
        fp = sum(1 for t, p in pairs if t != k and p == k)
        fn = sum(1 for t, p in pairs if t == k and p != k)
        if tp + fp + fn == 0:
            continue
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    tk = {k: sum(1 for t, _ in pairs if t == k) for k in LEVELS}
    pk = {k: sum(1 for _, p in pairs if p == k) for k in LEVELS}
    num = c * s - sum(pk[k] * tk[k] for k in LEVELS)
    den = (s * s - sum(v * v for v in pk.values())) * (s * s - sum(v * v for v in tk.values()))
    mcc = num / math.sqrt(den) if den > 0 else 0.0
    return {
        "instances": s,
        "correct": c,
        "accuracy": c / s,
        "macro_f1": sum(f1s) / len(f1s),
        "mcc": mcc,
        "mcc_undefined": den <= 0,
    }


def check_sklearn(cases):
    from sklearn.metrics import accuracy_score, f1_score, matthews_corrcoef
    for name, case in cases.items():
        if any(case["invalid"]):
            continue
        pairs = expand(case)
        y_true = [t for t, _ in pairs]
        y_pred = [p for _, p in pairs]
        want = measures(pairs)
        got = (accuracy_score(y_true, y_pred), f1_score(y_true, y_pred, average="macro"),
               matthews_corrcoef(y_true, y_pred))
        for key, value in zip(("accuracy", "macro_f1", "mcc"), got):
            if abs(value - want[key]) > 1e-12:
                sys.exit(f"{name}: {key} {want[key]} != sklearn {value}")


def main():
    out = {name: dict(case, expected=measures(expand(case))) for name, case in CASES.items()}
    if "--check" in sys.argv:
        check_sklearn(CASES)
    OUT.write_text(json.dumps(out, indent=2) + "\n")


if __name__ == "__main__":
    main()
