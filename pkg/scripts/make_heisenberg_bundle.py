"""Build and verify a Heisenberg demonstration bundle.

Constructs the integer Heisenberg group as 3x3 unitriangular matrices,
combines a central-powers demonstration with a quotient-plane one, and
writes the result as a workspace file.  The bundle is then reloaded from
disk and re-verified, so a zero exit status means the file round-trips.

Usage:
    python3 scripts/make_heisenberg_bundle.py --out heisenberg.epic
"""

import argparse
import sys

from epicdemo import (
    Demonstration,
    IntegerMatrixOracle,
    Letter,
    Workspace,
    extension,
    load,
    make_word,
    render,
    z_demo,
    zk_demo,
)


def heisenberg_oracle() -> IntegerMatrixOracle:
    x = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
    y = ((1, 0, 0), (0, 1, 1), (0, 0, 1))
    z = ((1, 0, 1), (0, 1, 0), (0, 0, 1))

    def inv(m):
        a, c = m[0][1], m[0][2]
        b = m[1][2]
        return ((1, -a, a * b - c), (0, 1, -b), (0, 0, 1))

    return IntegerMatrixOracle(3, {
        Letter("x"): x, Letter("x^-1"): inv(x),
        Letter("y"): y, Letter("y^-1"): inv(y),
        Letter("z"): z, Letter("z^-1"): inv(z),
    })


def in_center(key) -> bool:
    rows = [r.split(",") for r in key.data.decode().split(";")]
    return rows[0][1] == "0" and rows[1][2] == "0"


def build() -> Demonstration:
    oracle = heisenberg_oracle()
    center = Demonstration(oracle,
                           {Letter("z"): make_word("z"),
                            Letter("z^-1"): make_word("z^-1")},
                           z_demo("z").language)
    plane = zk_demo(2, names=("x", "y"))
    quotient = Demonstration(oracle, {x: (x,) for x in plane.language.alphabet},
                             plane.language)
    return extension(center, quotient, oracle, in_center)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="heisenberg.epic")
    parser.add_argument("--max-len", type=int, default=8)
    parser.add_argument("--ball", type=int, default=3)
    parser.add_argument("--search-len", type=int, default=10)
    args = parser.parse_args(argv)

    demo = build()
    bundle = Workspace()
    bundle.groups["heis"] = demo.oracle
    bundle.automata["heis_lang"] = demo.language
    bundle.demonstrations["heisdemo"] = demo
    bundle.demo_refs["heisdemo"] = ("heis", "heis_lang")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(render(bundle))
    print(f"wrote {args.out}")

    reloaded = load([args.out]).demonstrations["heisdemo"]
    violations = reloaded.verify_no_identity(args.max_len)
    report = reloaded.verify_coverage(args.ball, args.search_len)
    print(f"reloaded: identity violations {len(violations)}, "
          f"covered {len(report.covered)}, missing {len(report.missing)}")
    return 0 if not violations and report.complete and report.clean else 1


if __name__ == "__main__":
    sys.exit(main())
