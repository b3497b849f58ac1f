#!/usr/bin/env python3
"""Run verify_horizon over a grid of fields and modes and write one JSON report per cell.

    python scripts/horizon_sweep.py --fields z2 z3 --out results/
    python scripts/horizon_sweep.py --fields q --mode sample --seeds 0 1 2
"""

from __future__ import annotations

import argparse
import logging
from dataclasses import dataclass, field
from pathlib import Path

from nomic import io
from nomic.exactalg import Field
from nomic.horizon import Infeasible, verify_horizon

log = logging.getLogger("horizon_sweep")


@dataclass
class SweepConfig:
    fields: list = field(default_factory=lambda: ["z2", "z3"])
    mode: str = "exhaustive"
    n_S: int = 1
    n_A: int = 1
    seeds: list = field(default_factory=lambda: [0])
    samples: int = 200
    word_length: int = 12
    out: Path = Path("results/horizon")


def run(cfg: SweepConfig) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    failures = 0
    seeds = cfg.seeds if cfg.mode == "sample" else [None]
    for name in cfg.fields:
        F = Field.from_name(name)
        for seed in seeds:
            try:
                rep = verify_horizon(F, cfg.n_S, cfg.n_A, cfg.mode, seed=seed, samples=cfg.samples, word_length=cfg.word_length)
            except Infeasible as exc:
                log.warning("%s: skipped (%s)", F.name, exc)
                continue
            tag = f"{F.name}_{cfg.mode}_{cfg.n_S}x{cfg.n_A}" + (f"_seed{seed}" if seed is not None else "")
            io.write_atomic(cfg.out / f"{tag}.json", io.dumps(rep.to_dict()))
            log.info("%s: %s, %d measurements, %.1fs", tag, rep.verdict, rep.measurements_checked, rep.elapsed)
            failures += not rep.passed
    return failures


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fields", nargs="+", default=["z2", "z3"])
    ap.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    ap.add_argument("--ns", type=int, default=1)
    ap.add_argument("--na", type=int, default=1)
    ap.add_argument("--seeds", nargs="+", type=int, default=[0])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--out", type=Path, default=Path("results/horizon"))
    a = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    cfg = SweepConfig(a.fields, a.mode, a.ns, a.na, a.seeds, a.samples, out=a.out)
    return 1 if run(cfg) else 0


if __name__ == "__main__":
    raise SystemExit(main())
