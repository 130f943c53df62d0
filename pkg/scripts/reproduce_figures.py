#!/usr/bin/env python3
"""Regenerate the data behind the five figure analogues from configs/figN.cfg.

Each figure is a parameter sweep; CSV/JSON files land in --out and a short
table of limits and observed labels is printed per sweep value.

    python3 scripts/reproduce_figures.py --figure 2 --out out/figures
"""

import argparse
import json
from pathlib import Path

from dephasing import harness
from dephasing.config import load

ROOT = Path(__file__).resolve().parents[1]
FIGURES = (1, 2, 3, 4, 5)


def run_figure(n: int, out: Path, workers: int) -> dict:
    cfg = load(ROOT / "configs" / f"fig{n}.cfg")
    index = harness.sweep(cfg, cfg.sweep.param, cfg.sweep.values, out, workers=workers)
    print(f"fig{n}: sweep over {cfg.sweep.param}")
    for e in index["entries"]:
        lim = e["limits"]
        obs = e["observed"]
        print(f"  {cfg.sweep.param}={e['value']:<6g} gamma_vac(inf)={lim['gamma_vac_inf']!s:<22}"
              f" gamma_th(inf)={lim['gamma_th_inf']!s:<22} observed={json.dumps(obs, sort_keys=True)}")
    return index


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--figure", default="all", choices=["all"] + [str(n) for n in FIGURES])
    p.add_argument("--out", type=Path, default=ROOT / "out" / "figures")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args(argv)
    figures = FIGURES if args.figure == "all" else (int(args.figure),)
    for n in figures:
        run_figure(n, args.out, args.workers)


if __name__ == "__main__":
    main()
