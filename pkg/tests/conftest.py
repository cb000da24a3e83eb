import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dampedqho import BathSpectrum, DampedOscillator, OscillatorParams, TimeGrid  # noqa: E402


@pytest.fixture(scope="session")
def default_bath():
    return BathSpectrum(eta=0.5, cutoff_lambda=10.0, temperature=0.0)


@pytest.fixture(scope="session")
def unit_osc():
    return OscillatorParams(1.0)


@pytest.fixture(scope="session")
def default_grid():
    return TimeGrid.from_tmax(0.01, 30.0)


@pytest.fixture(scope="session")
def model(default_bath, unit_osc, default_grid):
    """η=0.5, k=1, Λ=10, T=0 on [0, 30] with Δt = 0.01."""
    return DampedOscillator(default_bath, unit_osc, default_grid)


@pytest.fixture(scope="session")
def short_model(default_bath, unit_osc):
    """Default parameters on [0, 10], enough for τ ≤ 5 survival ratios."""
    return DampedOscillator(default_bath, unit_osc, TimeGrid.from_tmax(0.01, 10.0))


@pytest.fixture(scope="session")
def free_model(unit_osc):
    """Decoupled oscillator (η = 0) at T = 0."""
    return DampedOscillator(BathSpectrum(eta=0.0), unit_osc, TimeGrid.from_tmax(0.01, 10.0))


_MODE_CACHE = {}


@pytest.fixture(scope="session")
def discrete_modes():
    """Factory ``(eta, k, n_modes, omega_max) -> (DiscreteBath, NormalModes)``, cached.

    The dense eigendecomposition takes ~15 s at J = 4000 and does not depend
    on temperature, so it is shared across test modules.
    """
    from dampedqho.oracle import DiscreteBath, normal_modes

    def get(eta=0.5, k=1.0, n_modes=4000, omega_max=80.0, temperature=0.0):
        key = (eta, k, n_modes, omega_max)
        if key not in _MODE_CACHE:
            db = DiscreteBath(BathSpectrum(eta=eta), n_modes, omega_max)
            _MODE_CACHE[key] = normal_modes(db, OscillatorParams(k))
        base = _MODE_CACHE[key]
        bath = BathSpectrum(eta=eta, temperature=temperature)
        db = DiscreteBath(bath, n_modes, omega_max)
        modes = type(base)(base.omegas, base.weights, temperature)
        return db, modes

    return get
