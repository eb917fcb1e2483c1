"""Shared fixtures: the built-in scenario runs are expensive, so they are
executed once per session and reused by every test that needs them."""

import numpy as np
import pytest

from beclat import builtin_scenario, run_scenario, subdiffusion_config


@pytest.fixture(scope="session")
def results_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("runs")


def _run_builtin(name, results_dir):
    return run_scenario(builtin_scenario(name), results_dir / name)


@pytest.fixture(scope="session")
def fig1_result(results_dir):
    return _run_builtin("fig1", results_dir)


@pytest.fixture(scope="session")
def fig2_result(results_dir):
    return _run_builtin("fig2", results_dir)


@pytest.fixture(scope="session")
def fig3_result(results_dir):
    return _run_builtin("fig3", results_dir)


@pytest.fixture(scope="session")
def fig4_result(results_dir):
    return _run_builtin("fig4", results_dir)


@pytest.fixture(scope="session")
def fig5_result(results_dir):
    return _run_builtin("fig5", results_dir)


@pytest.fixture(scope="session")
def coherence_results(results_dir, fig2_result):
    """Carpet runs for the force ladder F = 10, 20, 40 (F = 10 is fig2)."""
    out = {10.0: fig2_result}
    for F in (20.0, 40.0):
        cfg = builtin_scenario("fig2", name=f"carpet_F{F:g}", F=F)
        out[F] = run_scenario(cfg, results_dir / cfg.name)
    return out


@pytest.fixture(scope="session")
def smoke_subdiffusion_result(results_dir):
    """Reduced-horizon spreading run: F = 0.25, 500 Bloch periods."""
    cfg = subdiffusion_config(F=0.25, horizon_TB=500.0, dt=0.02, name="subdiff_smoke")
    return run_scenario(cfg, results_dir / cfg.name)
