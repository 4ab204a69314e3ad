import numpy as np
import pytest

from misreport import ArmaParams, MisreportModel, estimate, simulate_observed

DATA_MODEL = MisreportModel(
    arma=ArmaParams(alpha=(0.5,), mu_eps=5.0, sigma2_eps=1.0), q=0.3, omega=0.5
)


@pytest.fixture(scope="session")
def data_dir(pytestconfig):
    return pytestconfig.rootpath / "data"


@pytest.fixture(scope="session")
def recovery_fits():
    """50 seeded replicates of the reference AR(1) recovery setting.

    Shared by the recovery and contrast checks so the expensive estimates run
    once per session.
    """
    fits = []
    for s in range(50):
        sample = simulate_observed(DATA_MODEL, 1000, seed=1000 + s)
        fits.append((sample, estimate(sample.y, 1, 0)))
    return fits
