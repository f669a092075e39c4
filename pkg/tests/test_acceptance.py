"""All twelve acceptance criteria at their stated tolerances.

Criteria 1 to 11 run the same record builders as ``logrep acceptance``;
criterion 12 runs the CLI twice and compares the reports byte for byte.
Each criterion prints one PASS/FAIL line (also echoed in the pytest
terminal summary).  Run directly with ``python tests/test_acceptance.py``.
"""

import subprocess
import sys
from pathlib import Path

import pytest

from logrep.experiments import CRITERIA, run_criterion

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

SEED = 42


def report(number, title, ok, detail):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def summarize(records):
    checked = [r for r in records if r.expect != "info"]
    failed = [r for r in records if not r.passed]
    ratios = [r.value / r.tolerance for r in checked if r.expect == "pass" and r.tolerance > 0]
    detail = f"{len(checked)} checks, {len(failed)} failing"
    if ratios:
        detail += f", worst value/tolerance {max(ratios):.3g}"
    expected = sum(r.expect == "fail" for r in records)
    if expected:
        detail += f", {expected} expected failures"
    return failed, detail


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    title = CRITERIA[number][0]
    records = run_criterion(number, SEED).records
    failed, detail = summarize(records)
    report(number, title, not failed and records, detail)
    assert records, "criterion produced no records"
    assert not failed, f"first failing record: {failed[0]}"


def run_cli(out):
    cmd = [sys.executable, "-m", "logrep", "acceptance", "--seed", str(SEED), "--out", str(out)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    return proc.returncode, out


def test_criterion_12_determinism(tmp_path):
    code_a, a = run_cli(tmp_path / "a")
    code_b, b = run_cli(tmp_path / "b")
    files = sorted(p.name for p in a.iterdir())
    same = files == sorted(p.name for p in b.iterdir())
    for name in files:
        ta, tb = (a / name).read_bytes(), (b / name).read_bytes()
        if name.endswith(".jsonl"):  # the header line carries a timestamp
            ta, tb = ta.split(b"\n", 1)[1], tb.split(b"\n", 1)[1]
        same = same and ta == tb
    ok = same and code_a == 0 and code_b == 0
    report(12, "determinism", ok,
           f"{len(files)} output files, exit codes {code_a}/{code_b}, "
           f"{'byte-identical' if same else 'outputs differ'}")
    assert code_a == 0 and code_b == 0
    assert same


if __name__ == "__main__":
    import tempfile
    for n in sorted(CRITERIA):
        try:
            test_criterion(n)
        except AssertionError:
            pass
    with tempfile.TemporaryDirectory() as tmp:
        try:
            test_criterion_12_determinism(Path(tmp))
        except AssertionError:
            pass
