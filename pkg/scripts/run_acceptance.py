"""Print one pass/fail line per acceptance criterion; exit non-zero if any fail."""
import argparse
import sys
import time

from l2vhs.acceptance import CRITERIA, run_criterion


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("numbers", nargs="*", type=int, help="criteria to run (default: all)")
    args = parser.parse_args()
    numbers = args.numbers or [n for n, _, _ in CRITERIA]
    start = time.perf_counter()
    failed = 0
    for n in numbers:
        v = run_criterion(n)
        failed += not v.passed
        print(f"{v.line()}  ({v.seconds:.1f}s)", flush=True)
    print(f"{len(numbers) - failed}/{len(numbers)} passed in {time.perf_counter() - start:.1f}s")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
