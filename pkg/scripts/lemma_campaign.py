"""Run a finite-set campaign from a JSON config and write its report.

Thin wrapper over ``brightlab lemma-campaign`` so campaigns can be launched
from a checkout without installing the console script.  See
scripts/configs/ for ready-made configs (antipodal falsification sweep and
candidate-matching solver run).
"""

import argparse

from brightlab.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("config", help="path to a lemma-campaign JSON config")
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--out", default="lemma-campaign-report.json")
    parser.add_argument("--csv", action="store_true", help="also write per-trial rows")
    args = parser.parse_args()

    argv = ["lemma-campaign", "--config", args.config, "--seed", str(args.seed), "--out", args.out]
    if args.csv:
        argv.append("--csv")
    return cli_main(argv)


if __name__ == "__main__":
    raise SystemExit(main())
