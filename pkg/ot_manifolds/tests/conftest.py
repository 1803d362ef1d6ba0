"""Shared fields and OT data for the test suite."""

import pytest

from ot_manifolds.config import Config
from ot_manifolds.exact.polynomial import IntPolynomial
from ot_manifolds.exact.precision import PrecisionPolicy
from ot_manifolds.fields.number_field import build_field
from ot_manifolds.manifolds.ot import assemble_ot

POLICY = PrecisionPolicy(128)


def make_field(coefficients, label=''):
    """Field from ascending coefficients at 128 bits."""
    return build_field(IntPolynomial.from_coefficients(coefficients), POLICY, label)


@pytest.fixture(scope='session')
def policy():
    return POLICY


@pytest.fixture(scope='session')
def plastic():
    """Q[t]/(t^3 - t - 1), signature (1, 1)."""
    return make_field([-1, -1, 0, 1], 'plastic')


@pytest.fixture(scope='session')
def quartic():
    """Q[t]/(t^4 - t - 1), signature (2, 1)."""
    return make_field([-1, -1, 0, 0, 1], 'quartic')


@pytest.fixture(scope='session')
def quintic():
    """Q[t]/(t^5 - t - 1), signature (1, 2)."""
    return make_field([-1, -1, 0, 0, 0, 1], 'quintic')


@pytest.fixture(scope='session')
def sextic():
    """Q[t]/(t^6 - 2), signature (2, 2)."""
    return make_field([-2, 0, 0, 0, 0, 0, 1], 'sextic')


@pytest.fixture(scope='session')
def cube_root_two():
    """Q[t]/(t^3 - 2), signature (1, 1)."""
    return make_field([-2, 0, 0, 1], 'cube-root-two')


@pytest.fixture(scope='session')
def plastic_ot(plastic):
    return assemble_ot(plastic, [plastic.generator])


@pytest.fixture(scope='session')
def quintic_ot(quintic):
    return assemble_ot(quintic, [quintic.generator])


@pytest.fixture
def small_config(tmp_path):
    """Configuration with small sample counts, written to a temporary file."""
    path = tmp_path / 'config.yaml'
    path.write_text("""
checks:
  trials: 30
  leaf_samples: 20
  invariance_words: 10
  semipositivity_samples: 50
  ddc_points: 3
  embedding_trials: 20
  inclusion_pairs: 20
search:
  coeff_bound: 2
monitoring:
  log_level: ERROR
""")
    return Config(str(path))
