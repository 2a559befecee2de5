#!/usr/bin/env python3
"""Rebuild data/adult.csv from the EthicML package's bundled copy of UCI Adult.

The EthicML wheel ships the combined adult.data + adult.test (rows with
missing values dropped, 45222 rows) in one-hot form.  This script folds the
one-hot groups back into single categorical columns and restores the original
UCI column order and display names.

Usage:
    pip download ethicml --no-deps -d /tmp/wheels
    python3 scripts/prepare_adult.py /tmp/wheels/ethicml-*.whl data/adult.csv
"""

import csv
import io
import sys
import zipfile

NUMERIC = {
    "age": "Age",
    "fnlwgt": "fnlwgt",
    "education-num": "Education-Num",
    "capital-gain": "Capital Gain",
    "capital-loss": "Capital Loss",
    "hours-per-week": "Hours Per Week",
}

GROUPS = {
    "workclass": "Workclass",
    "education": "Education",
    "marital-status": "Marital Status",
    "occupation": "Occupation",
    "relationship": "Relationship",
    "race": "Race",
    "sex": "Sex",
    "native-country": "Country",
}

# UCI attribute order.
OUT_COLUMNS = [
    "Age", "Workclass", "fnlwgt", "Education", "Education-Num",
    "Marital Status", "Occupation", "Relationship", "Race", "Sex",
    "Capital Gain", "Capital Loss", "Hours Per Week", "Country", "Income",
]


def main(wheel_path: str, out_path: str) -> None:
    outer = zipfile.ZipFile(wheel_path)
    inner_name = next(n for n in outer.namelist() if n.endswith("adult.csv.zip"))
    inner = zipfile.ZipFile(io.BytesIO(outer.read(inner_name)))
    raw = inner.read("adult.csv").decode("utf-8")

    reader = csv.reader(io.StringIO(raw))
    header = next(reader)

    numeric_idx = {}
    group_members = {g: [] for g in GROUPS}  # group -> [(col_idx, value)]
    label_idx = None
    for i, col in enumerate(header):
        if col in NUMERIC:
            numeric_idx[col] = i
            continue
        if col == "salary_>50K":
            label_idx = i
            continue
        if col == "salary_<=50K":
            continue
        group, _, value = col.partition("_")
        if group not in GROUPS:
            raise SystemExit(f"unexpected column: {col}")
        group_members[group].append((i, value))

    assert len(numeric_idx) == 6 and label_idx is not None

    rows_out = []
    for row in reader:
        rec = {}
        for col, i in numeric_idx.items():
            rec[NUMERIC[col]] = row[i]
        for group, members in group_members.items():
            hot = [v for i, v in members if row[i] == "1"]
            if len(hot) != 1:
                raise SystemExit(f"non one-hot row in group {group}: {hot}")
            rec[GROUPS[group]] = hot[0]
        rec["Income"] = "1" if row[label_idx] == "1" else "0"
        rows_out.append([rec[c] for c in OUT_COLUMNS])

    with open(out_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(OUT_COLUMNS)
        w.writerows(rows_out)
    print(f"wrote {len(rows_out)} rows to {out_path}")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        raise SystemExit(__doc__)
    main(sys.argv[1], sys.argv[2])
