"""Shared hooks: the acceptance suite reports one line per criterion."""
from __future__ import annotations

import pytest

_CRITERIA: dict[int, dict] = {}


class CriterionRecorder:
    def __call__(self, number: int, title: str, part: str, passed: bool, detail: str = "") -> None:
        entry = _CRITERIA.setdefault(number, {"title": title, "parts": []})
        entry["parts"].append((part, bool(passed), detail))


@pytest.fixture
def criterion() -> CriterionRecorder:
    return CriterionRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        ok = all(p[1] for p in entry["parts"])
        failed = [f"{name}: {detail}" if detail else name for name, passed, detail in entry["parts"] if not passed]
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {entry['title']}"
        tr.write_line(line)
        for f in failed:
            tr.write_line(f"    failed part - {f}")
