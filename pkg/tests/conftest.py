"""Shared fixtures: one full experiment run per session, and a terminal
summary section that prints one pass/fail line per acceptance criterion."""

from __future__ import annotations

import pytest

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(tag: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} {tag}: {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def repro_dir(tmp_path_factory):
    """A completed full experiment run (CSV artifacts + manifest.json).

    Takes a few minutes; set BSMETA_REPRO_DIR to a directory holding a
    previous run's manifest.json to reuse it.
    """
    import os
    from pathlib import Path

    from bsmeta.experiments import run_all

    cached = os.environ.get("BSMETA_REPRO_DIR")
    if cached and (Path(cached) / "manifest.json").exists():
        return Path(cached)
    out = tmp_path_factory.mktemp("repro")
    run_all(out)
    return out
