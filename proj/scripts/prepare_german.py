#!/usr/bin/env python3
"""Rebuild data/german.csv from the OpenML credit-g ARFF (bundled in pysubgroup).

credit-g is the UCI Statlog German Credit data (1000 rows, 7 numerical and
13 categorical features) with readable category names.  Columns are renamed
to the compact names commonly used for this dataset.  The label is encoded
as bad risk = 1, good risk = 0.

Usage:
    pip download pysubgroup --no-deps -d /tmp/wheels
    python3 scripts/prepare_german.py /tmp/wheels/pysubgroup-*.whl data/german.csv
"""

import csv
import sys
import zipfile

# ARFF attribute name -> output column name, in UCI attribute order.
RENAME = [
    ("checking_status", "existingchecking"),
    ("duration", "duration"),
    ("credit_history", "credithistory"),
    ("purpose", "purpose"),
    ("credit_amount", "creditamount"),
    ("savings_status", "savings"),
    ("employment", "employmentsince"),
    ("installment_commitment", "installmentrate"),
    ("personal_status", "statussex"),
    ("other_parties", "otherdebtors"),
    ("residence_since", "residencesince"),
    ("property_magnitude", "property"),
    ("age", "age"),
    ("other_payment_plans", "otherinstallmentplans"),
    ("housing", "housing"),
    ("existing_credits", "existingcredits"),
    ("job", "job"),
    ("num_dependents", "peopleliable"),
    ("own_telephone", "telephone"),
    ("foreign_worker", "foreignworker"),
    ("class", "classification"),
]

NUMERIC_OUT = {"duration", "creditamount", "installmentrate", "residencesince",
               "age", "existingcredits", "peopleliable"}


def split_arff_row(line: str) -> list[str]:
    fields, cur, quoted = [], [], False
    for ch in line:
        if ch == "'":
            quoted = not quoted
        elif ch == "," and not quoted:
            fields.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    fields.append("".join(cur))
    return fields


def main(wheel_path: str, out_path: str) -> None:
    z = zipfile.ZipFile(wheel_path)
    text = z.read("pysubgroup/data/credit-g.arff").decode("utf-8")

    attrs = []
    rows = []
    in_data = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            rows.append(split_arff_row(line))
        elif line.lower().startswith("@attribute"):
            attrs.append(line.split()[1])
        elif line.lower().startswith("@data"):
            in_data = True

    if attrs != [a for a, _ in RENAME]:
        raise SystemExit(f"unexpected attributes: {attrs}")

    out_cols = [b for _, b in RENAME]
    with open(out_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(out_cols)
        for row in rows:
            if len(row) != len(out_cols):
                raise SystemExit(f"bad row: {row}")
            rec = []
            for (name, value) in zip(out_cols, row):
                if name == "classification":
                    rec.append("1" if value == "bad" else "0")
                elif name in NUMERIC_OUT:
                    # credit-g stores integers as reals ("6.0" style in some dumps)
                    rec.append(str(int(float(value))))
                else:
                    rec.append(value)
            w.writerow(rec)
    print(f"wrote {len(rows)} rows to {out_path}")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        raise SystemExit(__doc__)
    main(sys.argv[1], sys.argv[2])
