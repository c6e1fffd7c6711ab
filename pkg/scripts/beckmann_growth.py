"""Print the Beckmann growth table: approximate vs exact computation sizes.

    python3 scripts/beckmann_growth.py --k 1 2 3 --max-length 8 [--json out.json]
"""
from __future__ import annotations

import argparse
import json

from pvw.beckmann import growth_table

COLUMNS = ("k", "length", "approx_nodes", "exact_nodes", "proof_nodes", "proof_size",
           "transform_nodes", "transform_ok")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--max-length", type=int, default=8)
    ap.add_argument("--json", help="also write the rows as JSON")
    args = ap.parse_args(argv)

    rows = [r for k in args.k for r in growth_table(k, range(1, args.max_length + 1))]
    print(" | ".join(COLUMNS))
    print(" | ".join("---" for _ in COLUMNS))
    for r in rows:
        print(" | ".join(str(getattr(r, c)) for c in COLUMNS))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump([r.to_json() for r in rows], fh, indent=2)
    return 0 if all(r.transform_ok for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
