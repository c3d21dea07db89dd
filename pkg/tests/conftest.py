import hashlib
import json
from pathlib import Path

import pytest

import cqaloc
from cqaloc.ensemble import SweepConfig, read_records, run_cqa_sweep, write_records

REPORT_KEY = pytest.StashKey[dict]()
CRITERIA = range(1, 11)

# modules whose code determines sweep records; the CLI and chain model do not
_SWEEP_MODULES = ("graphs", "statespace", "hamiltonian", "eigensolver", "observables", "ensemble", "stats")


def _source_digest() -> str:
    root = Path(cqaloc.__file__).parent
    h = hashlib.sha256()
    for name in _SWEEP_MODULES:
        h.update((root / f"{name}.py").read_bytes())
    return h.hexdigest()


def pytest_configure(config):
    config.stash[REPORT_KEY] = {}


@pytest.fixture(scope="session")
def acceptance(request):
    """Callable recording one pass/fail line per acceptance criterion."""
    report = request.config.stash[REPORT_KEY]

    def record(number: int, ok: bool, detail: str) -> None:
        report[number] = (ok, detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")

    return record


@pytest.fixture(scope="session")
def cached_sweep(request):
    """Run a sweep once and keep its records in the pytest cache.

    The key covers the sweep configuration and the source of every module
    that influences the records, so any code change forces a recompute.
    ``pytest --cache-clear`` does the same explicitly.
    """
    folder = request.config.cache.mkdir("cqaloc-sweeps")
    digest = _source_digest()

    def run(tag: str, cfg: SweepConfig):
        key = hashlib.sha256((json.dumps(cfg.describe(), sort_keys=True) + digest).encode()).hexdigest()[:16]
        path = folder / f"{tag}-{key}.csv"
        if path.exists():
            return read_records(path)
        records = run_cqa_sweep(cfg)
        tmp = path.with_suffix(".tmp")
        write_records(tmp, records, cfg.q)
        tmp.replace(path)
        return read_records(path)

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    report = config.stash.get(REPORT_KEY, {})
    if not report:
        return
    terminalreporter.section("acceptance criteria")
    for n in CRITERIA:
        if n in report:
            ok, detail = report[n]
            terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {n:2d}: NOT RUN")
