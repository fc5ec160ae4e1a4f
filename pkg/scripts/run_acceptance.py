#!/usr/bin/env python3
"""Run the acceptance suite and echo its PASS/FAIL lines.

    python3 scripts/run_acceptance.py            # all six criteria
    python3 scripts/run_acceptance.py -k test_4  # one of them
"""
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main(argv):
    cmd = [sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-q", *argv]
    proc = subprocess.run(cmd, cwd=ROOT, capture_output=True, text=True)
    lines = [l for l in proc.stdout.splitlines() if l.startswith("ACCEPTANCE")]
    print("\n".join(lines) if lines else proc.stdout)
    if proc.returncode not in (0, 5):
        print(proc.stdout.splitlines()[-1] if proc.stdout else proc.stderr, file=sys.stderr)
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
