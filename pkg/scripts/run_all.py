"""Run every suite on every built-in scenario and write one JSON report per pair."""

import argparse
import pathlib
import sys

from equiloc import cli, scenarios, suites


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="reports")
    p.add_argument("--skip-4d", action="store_true", help="skip the slow product scenarios")
    args = p.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in scenarios.CATALOG:
        if args.skip_4d and name.startswith("product"):
            continue
        for suite in suites.SUITES:
            status, report = cli.run(cli.RunSpec(name, suite))
            (out / f"{name}__{suite}.json").write_text(cli.dumps(report) + "\n")
            s = report.get("summary", {})
            print(f"{name:26s} {suite:9s} exit={status} {s}")
            worst = max(worst, status)
    return worst


if __name__ == "__main__":
    sys.exit(main())
