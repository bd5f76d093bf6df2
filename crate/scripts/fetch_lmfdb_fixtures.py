#!/usr/bin/env python3
"""Fetch adelic-image generators from the LMFDB and write ppcert input records.

Usage:
    scripts/fetch_lmfdb_fixtures.py [--m0 LABEL=N ...] [--convention row|column] [--out FILE]

For each curve the script queries ec_curvedata for adelic_level, adelic_index
and adelic_gens, reduces every generator modulo the chosen m0 (which must
divide the adelic level), and writes one JSON line per curve. A provenance
file with the raw API responses and retrieval time is written next to it.

m0 is not computed here. Supply it with --m0; curves without an override use
the adelic level itself.
"""

import argparse
import datetime
import json
import pathlib
import sys
import urllib.parse
import urllib.request

API = "https://www.lmfdb.org/api/ec_curvedata/"
FIELDS = "lmfdb_label,adelic_level,adelic_index,adelic_gens"
DEFAULT_LABELS = ["232544.f1", "1944.c1"]
DEFAULT_M0 = {"1944.c1": 12}
ROOT = pathlib.Path(__file__).resolve().parent.parent
DEFAULT_OUT = ROOT / "crates/cli/tests/fixtures/lmfdb/examples.jsonl"


def fetch(label):
    query = urllib.parse.urlencode(
        {"lmfdb_label": label, "_format": "json", "_fields": FIELDS}
    )
    with urllib.request.urlopen(f"{API}?{query}", timeout=30) as resp:
        payload = json.load(resp)
    rows = payload.get("data", [])
    if len(rows) != 1:
        raise SystemExit(f"{label}: expected one row, got {len(rows)}")
    return rows[0]


def to_record(row, m0, convention):
    level = row["adelic_level"]
    if level % m0 != 0:
        raise SystemExit(f"{row['lmfdb_label']}: m0={m0} does not divide level {level}")
    gens = []
    for a, b, c, d in row["adelic_gens"] or []:
        m = [[a % m0, b % m0], [c % m0, d % m0]]
        if convention == "row":
            # row-vector action x -> xM becomes column action v -> M^T v
            m = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
        gens.append(m)
    return {
        "label": row["lmfdb_label"],
        "m0": m0,
        "adelic_index": row["adelic_index"],
        "generators": gens,
    }


def parse_overrides(items):
    out = dict(DEFAULT_M0)
    for item in items:
        label, _, value = item.partition("=")
        out[label] = int(value)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("labels", nargs="*", default=DEFAULT_LABELS)
    ap.add_argument("--m0", action="append", default=[], metavar="LABEL=N")
    ap.add_argument("--convention", choices=["row", "column"], default="row",
                    help="how the LMFDB generators act on vectors (default: row)")
    ap.add_argument("--out", type=pathlib.Path, default=DEFAULT_OUT)
    args = ap.parse_args()

    m0_for = parse_overrides(args.m0)
    records, raw = [], []
    for label in args.labels:
        row = fetch(label)
        raw.append(row)
        records.append(to_record(row, m0_for.get(label, row["adelic_level"]), args.convention))

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
    provenance = {
        "source": API,
        "fields": FIELDS,
        "retrieved": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "convention": args.convention,
        "m0": {r["label"]: r["m0"] for r in records},
        "responses": raw,
    }
    args.out.with_suffix(".provenance.json").write_text(
        json.dumps(provenance, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
