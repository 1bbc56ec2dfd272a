"""Run the theorem suite over every model family and print the tables."""
import argparse
import time

from qtense.verify import FAMILIES, format_report, run_suite, suite_exit_code


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cases", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--no-ch-filter", action="store_true")
    args = ap.parse_args()
    for fam in FAMILIES:
        t0 = time.perf_counter()
        reports = run_suite(fam, args.cases, args.seed, ch_filter=not args.no_ch_filter)
        print(f"== {fam}  ({time.perf_counter() - t0:.1f}s, exit {suite_exit_code(reports)})")
        print(format_report(reports))


if __name__ == "__main__":
    main()
