#!/usr/bin/env python3
# Copyright 2026 The lmboost Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Exports the Mayo Clinic PBC sequential data (R survival::pbcseq) as a
long-format CSV using the pbc2 column names.

    pip install rdatasets
    python3 tools/export_pbc2.py data/pbc2.csv
"""
import sys

import rdatasets

DAYS_PER_YEAR = 365.25


def main(out_path):
    d = rdatasets.data("survival", "pbcseq").sort_values(["id", "day"])
    status = {0: "alive", 1: "transplanted", 2: "dead"}
    yes_no = {0.0: "No", 1.0: "Yes"}
    edema = {0.0: "No edema", 0.5: "edema no diuretics", 1.0: "edema despite diuretics"}

    def num(x):
        return "" if x != x else repr(float(x))

    def cat(x, table):
        return "" if x != x else table[float(x)]

    cols = ["id", "years", "status", "drug", "age", "sex", "year", "ascites",
            "hepatomegaly", "spiders", "edema", "serBilir", "serChol", "albumin",
            "alkaline", "SGOT", "platelets", "prothrombin", "histologic"]
    with open(out_path, "w", encoding="utf-8") as f:
        f.write(",".join(cols) + "\n")
        for r in d.itertuples(index=False):
            row = [
                str(int(r.id)),
                repr(r.futime / DAYS_PER_YEAR),
                status[int(r.status)],
                "D-penicil" if int(r.trt) == 1 else "placebo",
                repr(float(r.age)),
                "female" if r.sex == "f" else "male",
                repr(r.day / DAYS_PER_YEAR),
                cat(r.ascites, yes_no),
                cat(r.hepato, yes_no),
                cat(r.spiders, yes_no),
                cat(r.edema, edema),
                num(r.bili),
                num(r.chol),
                num(r.albumin),
                num(getattr(r, "_15")),
                num(r.ast),
                num(r.platelet),
                num(r.protime),
                num(r.stage),
            ]
            f.write(",".join(row) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "pbc2.csv")
