"""Shared fixtures.

The acceptance suite needs full-scale preset runs (n=100, T=500, 100
seeds); those are expensive, so they run once per session and are shared
by every criterion that reads them. Thread count is taken from
MUONLAB_THREADS when set.
"""

import os

import pytest

from muonlab import presets


def _threads() -> int:
    env = os.environ.get("MUONLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


ACCEPTANCE_SEED = 0


@pytest.fixture(scope="session")
def table1_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("table1")
    presets.run_table1(str(out), base_seed=ACCEPTANCE_SEED, seeds=100, T=500,
                       threads=_threads())
    return out


@pytest.fixture(scope="session")
def table2_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("table2")
    presets.run_table2(str(out), base_seed=ACCEPTANCE_SEED, seeds=100, T=500,
                       threads=_threads())
    return out


@pytest.fixture(scope="session")
def fig4_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig4")
    info = presets.run_fig4(str(out), base_seed=ACCEPTANCE_SEED)
    (out / "runtime.txt").write_text(str(info["runtime_seconds"]))
    return out


@pytest.fixture(scope="session")
def fig5_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig5")
    presets.run_fig5(str(out), base_seed=ACCEPTANCE_SEED, seeds=100, T=100)
    return out
