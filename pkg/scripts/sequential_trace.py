#!/usr/bin/env python3
"""Momentum-then-position measurement on one toy bit: symbolic trace and what the pointers reveal."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from nomic.exactalg import Field
from nomic.horizon import appendix_a_scenario, disturbance_claims, run_sequence


@dataclass
class TraceConfig:
    field: str = "q"
    check_field: str = "z2"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--field", default="q", help="field for the symbolic trace")
    ap.add_argument("--check-field", default="z2", help="finite field for the exhaustive knowledge check")
    a = ap.parse_args()
    cfg = TraceConfig(a.field, a.check_field)

    F = Field.from_name(cfg.field)
    sc = appendix_a_scenario(F)
    tr = run_sequence(sc)
    print(f"coordinates: {', '.join(sc.space.labels)}")
    for t, (state, ptr) in enumerate(zip(tr.states, tr.pointer_readings)):
        label = "" if t == 0 else f" after {tr.labels[t - 1]}"
        print(f"t{t}{label}: ({', '.join(state)})   pointers {dict(ptr)}")
    for label, note in zip(tr.labels, tr.disturbance_notes):
        print(f"  {label} changed {note}")

    G = Field.from_name(cfg.check_field)
    claims = disturbance_claims(G)
    print(f"\nover {G.name}, with both ready values zero, the two final pointer values")
    for t in range(3):
        ok, w = claims[f"t{t}"]
        verdict = "determine" if ok else "do not determine"
        extra = "" if ok else f" (e.g. initial states {w[0][0]} and {w[1][0]})"
        print(f"  {verdict} S at t{t}{extra}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
