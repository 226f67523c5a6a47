#!/usr/bin/env python3
"""Empirical distortion survey: how the rules fare on random profiles.

Samples seeded random strict profiles, runs each rule, and reports the
distribution of the winner's worst-case distortion (the max over
opponents of the pairwise ratio LP).  Optionally dumps raw rows as JSON.

    python3 scripts/distortion_survey.py --profiles 100 --max-n 4 --max-m 5
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from dataclasses import asdict, dataclass

from mdx.metriclp import max_distortion
from mdx.profile import VotingProfile
from mdx.rules import RULE_IDS, apply_rule


@dataclass(frozen=True)
class SurveyConfig:
    profiles: int = 100
    max_n: int = 4
    max_m: int = 5
    seed: int = 0
    rules: tuple[str, ...] = RULE_IDS
    json_out: str | None = None


def parse_args(argv: list[str] | None = None) -> SurveyConfig:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--profiles", type=int, default=100)
    parser.add_argument("--max-n", type=int, default=4)
    parser.add_argument("--max-m", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--rules", nargs="+", default=list(RULE_IDS), choices=RULE_IDS)
    parser.add_argument("--json-out", help="write per-profile rows to this path")
    args = parser.parse_args(argv)
    return SurveyConfig(args.profiles, args.max_n, args.max_m, args.seed,
                        tuple(args.rules), args.json_out)


def sample_profile(rng: random.Random, cfg: SurveyConfig) -> VotingProfile:
    n = rng.randint(2, cfg.max_n)
    m = rng.randint(1, cfg.max_m)
    names = tuple(chr(ord("A") + i) for i in range(n))
    return VotingProfile(names, tuple(tuple(rng.sample(range(n), n)) for _ in range(m)))


def main(argv: list[str] | None = None) -> int:
    cfg = parse_args(argv)
    rng = random.Random(cfg.seed)
    rows = []
    stats = {rule: [] for rule in cfg.rules}
    for _ in range(cfg.profiles):
        p = sample_profile(rng, cfg)
        values = {}
        row = {"profile": [list(o) for o in p.orderings]}
        for rule in cfg.rules:
            winner = apply_rule(rule, p).winner
            if winner not in values:
                values[winner] = max_distortion(p, winner)
            row[rule] = {"winner": p.candidates[winner], "ratio": values[winner]}
            stats[rule].append(values[winner])
        rows.append(row)
    print(f"{'rule':>20} {'mean':>8} {'p95':>8} {'max':>8} {'unbounded':>10}")
    for rule in cfg.rules:
        finite = sorted(v for v in stats[rule] if math.isfinite(v))
        unbounded = len(stats[rule]) - len(finite)
        if finite:
            mean = sum(finite) / len(finite)
            p95 = finite[min(len(finite) - 1, math.ceil(0.95 * len(finite)) - 1)]
            top = finite[-1]
            print(f"{rule:>20} {mean:>8.4f} {p95:>8.4f} {top:>8.4f} {unbounded:>10}")
        else:
            print(f"{rule:>20} {'-':>8} {'-':>8} {'-':>8} {unbounded:>10}")
    if cfg.json_out:
        with open(cfg.json_out, "w") as handle:
            json.dump({"config": asdict(cfg), "rows": rows}, handle, indent=2)
        print(f"wrote {cfg.json_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
