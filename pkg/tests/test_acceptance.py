"""Acceptance suite: one test and one printed PASS/FAIL line per criterion."""

import json
import time

import pytest

from subordination import acceptance, cli

# checks are listed in criterion order; test_criterion confirms each number
CRITERIA = {i + 1: check for i, check in enumerate(acceptance.CHECKS)}


@pytest.fixture(scope="module")
def full_run():
    return {}


def _report(capsys, line):
    with capsys.disabled():
        print("\n" + line)


@pytest.mark.parametrize("criterion", sorted(CRITERIA))
def test_criterion(criterion, full_run, capsys):
    result = CRITERIA[criterion](acceptance.Context())
    full_run[criterion] = result.passed
    _report(capsys, result.line())
    assert result.criterion == criterion
    assert result.passed, result.metrics


def _quick_verdicts(tmp_path, capsys, seed):
    out = tmp_path / f"quick-{seed}"
    t0 = time.perf_counter()
    code = cli.run(["--seed", str(seed), "--out", str(out), "reproduce-all", "--quick"])
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    summary = json.loads((out / "summary.json").read_text())
    verdicts = {int(k): v for k, v in summary["results"]["summary"]["verdicts"].items()}
    return code, elapsed, verdicts, out


def test_criterion_9_quick_reproduce_all(full_run, tmp_path, capsys):
    code, elapsed, verdicts, out = _quick_verdicts(tmp_path, capsys, acceptance.Context().seed)
    same = set(full_run) == set(CRITERIA) and verdicts == full_run
    passed = elapsed < 60.0 and same
    status = "PASS" if passed else "FAIL"
    _report(capsys, f"[{status}] 9. reproduce-all --quick matches the full run ({elapsed:.2f}s / 60s)")
    assert set(full_run) == set(CRITERIA), "run the full criteria first (same module)"
    assert verdicts == full_run
    assert elapsed < 60.0
    assert code == (0 if all(verdicts.values()) else 1)
    for name in ["summary.json", "densities.csv", "ecdf.csv", "plots.gp"] + [f"check_{k}.csv" for k in CRITERIA]:
        assert (out / name).is_file()


def test_other_seed_same_verdicts(full_run, tmp_path, capsys):
    _, _, verdicts, _ = _quick_verdicts(tmp_path, capsys, 99)
    assert verdicts == full_run
