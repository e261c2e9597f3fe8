"""Coverage growth experiment.

For radii 1..N, report how much of the group ball a demonstration covers
when the word search is capped at ``stretch`` times the radius.  A clean
demonstration should reach zero missing keys once the cap is generous
enough; the table shows how fast that happens.

Usage:
    python3 scripts/coverage_growth.py --demo zk2 --max-radius 5
    python3 scripts/coverage_growth.py -f data/demo_workspace.epic --demo Zdemo
"""

import argparse
import re
import sys
import time
from dataclasses import dataclass, field

from epicdemo import Workspace, builtin_demo, load

ALIAS = re.compile(r"^(?:z|free(\d+)|zk(\d+))$", re.IGNORECASE)


@dataclass
class Config:
    demo: str = "z"
    max_radius: int = 6
    stretch: int = 2
    files: list = field(default_factory=list)


def parse_args(argv=None) -> Config:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--demo", default="z",
                        help="workspace demonstration or builtin name (z, free2, zk3)")
    parser.add_argument("--max-radius", type=int, default=6)
    parser.add_argument("--stretch", type=int, default=2,
                        help="search words up to stretch * radius letters")
    parser.add_argument("-f", "--file", dest="files", action="append", default=[],
                        metavar="PATH", help="workspace file; repeatable")
    args = parser.parse_args(argv)
    return Config(args.demo, args.max_radius, args.stretch, args.files)


def resolve(cfg: Config):
    ws = load(cfg.files) if cfg.files else Workspace()
    if cfg.demo in ws.demonstrations:
        return ws.demonstrations[cfg.demo]
    m = ALIAS.match(cfg.demo.strip())
    if m and m.group(1):
        return builtin_demo(f"free({m.group(1)})")
    if m and m.group(2):
        return builtin_demo(f"zk({m.group(2)})")
    return builtin_demo(cfg.demo)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    demo = resolve(cfg)
    print(f"demo {cfg.demo}: alphabet {' '.join(x.name for x in demo.language.alphabet)}")
    print(f"{'radius':>6} {'ball':>6} {'covered':>8} {'missing':>8} {'seconds':>8}")
    clean = True
    for radius in range(1, cfg.max_radius + 1):
        start = time.monotonic()
        report = demo.verify_coverage(radius, cfg.stretch * radius)
        elapsed = time.monotonic() - start
        covered, missing = len(report.covered), len(report.missing)
        clean = clean and report.clean
        print(f"{radius:>6} {covered + missing:>6} {covered:>8} {missing:>8} {elapsed:>8.2f}")
    violations = demo.verify_no_identity(cfg.stretch * cfg.max_radius)
    print(f"identity violations up to length {cfg.stretch * cfg.max_radius}: {len(violations)}")
    return 0 if clean and not violations else 1


if __name__ == "__main__":
    sys.exit(main())
