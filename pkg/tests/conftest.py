import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from figures_support import figure_configs, run_in_process  # noqa: E402


@pytest.fixture(scope="session")
def figure_outputs(tmp_path_factory):
    """Run every shipped figure config once; maps config stem to output path."""
    out_dir = tmp_path_factory.mktemp("figures")
    outputs = {}
    for cfg in figure_configs():
        out = out_dir / (cfg.stem + ".csv")
        assert run_in_process(cfg, out) == 0, f"{cfg.name} failed"
        outputs[cfg.stem] = out
    return outputs


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion: ``criterion(n, passed, detail)``."""

    def record(number: int, passed: bool, detail: str) -> bool:
        _ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
