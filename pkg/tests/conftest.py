import numpy as np
import pytest

from faultloc import table1_config
from faultloc.simulate import simulate_fault_pde, synthesize_output
from faultloc.spectrum import magnitude_spectrum

_REPORT = []


@pytest.fixture(scope="session")
def report():
    """Collects one PASS/FAIL line per acceptance criterion."""
    return _REPORT


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def cfg():
    return table1_config()


@pytest.fixture(scope="session")
def sys1(cfg):
    return cfg.system


@pytest.fixture(scope="session")
def synth_wave(cfg):
    f, s = cfg.fault, cfg.sim
    return synthesize_output(cfg.system, s.ell_true, f.t_f, f.sigma, s.T_s, s.n_samples)


@pytest.fixture(scope="session")
def synth_spec(synth_wave):
    return magnitude_spectrum(synth_wave)


@pytest.fixture(scope="session")
def pde_wave(cfg):
    f, s = cfg.fault, cfg.sim
    return simulate_fault_pde(
        cfg.system, s.ell_true, f.t_f, f.sigma, s.T_s, s.n_samples, s.spatial_nodes, s.substeps
    )


@pytest.fixture(scope="session")
def pde_spec(pde_wave):
    return magnitude_spectrum(pde_wave)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
