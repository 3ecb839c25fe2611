"""Acceptance criteria 1-10 at their stated tolerances, on the default
configuration (512 x 512 box, 50-member families). Each test prints one
``[PASS]`` / ``[FAIL]`` line with the measured values."""

import os
import subprocess
import sys
import time

import pytest

from paralog.config import ExperimentConfig
from paralog.selftest import SelfTest


@pytest.fixture(scope="module")
def suite():
    return SelfTest(ExperimentConfig())


@pytest.fixture(scope="module")
def blocks(suite):
    return suite._member_blocks()


@pytest.fixture
def report(capsys):
    """Run a check (or take a finished one), time it and print its line."""
    def emit(check, *args):
        if callable(check):
            t0 = time.perf_counter()
            check = check(*args)
            check.seconds = time.perf_counter() - t0
        with capsys.disabled():
            print("\n" + check.line())
        return check
    return emit


def test_c01_partition_of_unity(suite, report):
    assert report(suite.check_partition).passed


def test_c02_reconstruction(suite, blocks, report):
    chk = report(suite.check_reconstruction, blocks)
    assert chk.measured["functions"] == 50 and chk.passed


def test_c03_norm_oracles(suite, report):
    chk = report(suite.check_oracles, 25)
    assert chk.measured["holder_mismatches"] == 0 and chk.passed


def test_c04_split_bound(suite, blocks, report):
    chk = report(suite.check_split, blocks)
    assert chk.measured["rows"] == 50 * 9 and chk.passed


def test_c05_constants(suite, report):
    assert report(suite.check_constants).passed


def test_c06_component_estimates(suite, blocks, report):
    assert report(suite.check_components, blocks).passed


def test_c07_extension(suite, report):
    assert report(suite.check_extension).passed


def test_c08_implied_constant_stability(suite, report):
    chk = report(suite.check_stability)
    assert len([k for k in chk.measured if k.startswith("thm")]) == 6 and chk.passed


def test_c09_sharpness(suite, report):
    assert report(suite.check_sharpness).passed


def test_c10_selftest_end_to_end(report, tmp_path):
    from paralog.selftest import Check

    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "paralog", "selftest", "--out-dir",
                           str(tmp_path)], capture_output=True, text=True,
                          env={**os.environ}, timeout=600)
    secs = time.perf_counter() - t0
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith("[PASS]")]
    ok = proc.returncode == 0 and secs <= 120.0 and len(lines) == 9
    report(Check(10, "selftest end to end", ok,
                 {"exit": proc.returncode, "wall_s": secs, "passed_lines": len(lines)},
                 secs))
    assert ok, proc.stdout + proc.stderr
