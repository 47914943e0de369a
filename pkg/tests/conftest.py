import numpy as np
import pytest

from ris_esr import Scenario, reference_scenario
from ris_esr.monte_carlo import _all_gammas_cached


@pytest.fixture
def ref5() -> Scenario:
    """Benchmark geometry with five eavesdroppers."""
    return reference_scenario(k_eves=5)


@pytest.fixture
def cascade_eve() -> Scenario:
    """Single eavesdropper hugging the reflecting surface.

    Its SNR is dominated by the cascaded path, which makes the small-N
    departure from the exponential law visible.
    """
    return Scenario(
        source_pos=(0.0, 0.0),
        ris_pos=(100.0, 0.0),
        dest_pos=(90.0, 20.0),
        eve_positions=((100.0, 0.5),),
        n_elements=1,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)


@pytest.fixture(autouse=True)
def _fresh_sample_cache():
    """Keep cached Monte Carlo draws from leaking across tests that time or
    re-derive them."""
    yield
    _all_gammas_cached.cache_clear()
