#!/usr/bin/env python3
"""Exhaustive copier search on one toy bit over Z2, for every linear variable up to equivalence."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from nomic.exactalg import Field
from nomic.horizon import search_copier
from nomic.phasespace import make_phase_space
from nomic.variable import is_poisson, linear_variables_up_to_equivalence


@dataclass
class CopierConfig:
    field: str = "z2"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--field", default="z2")
    cfg = CopierConfig(ap.parse_args().field)
    S = make_phase_space(Field.from_name(cfg.field), 1, "S")
    bad = 0
    for Z in linear_variables_up_to_equivalence(S):
        t0 = time.perf_counter()
        found = search_copier(S, Z)
        dt = time.perf_counter() - t0
        rows = Z.Z.to_literal()
        status = "copier found" if found else "no copier"
        print(f"Z={rows!s:<18} poisson={is_poisson(Z)!s:<5} {status:<13} ({dt:.1f}s)")
        bad += (found is not None) != is_poisson(Z)
    print("copiable == Poisson:", "yes" if not bad else f"no ({bad} mismatches)")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
