"""Full-scale runs of the unit, action, leaf, form and embedding suites.

Sample counts match the shipped configuration defaults; run with ``pytest -m slow``.
"""

import mpmath
import pytest

from ot_manifolds.fields.units import build_unit_system, dirichlet_rank_check, unit_search
from ot_manifolds.manifolds.form import form_suite
from ot_manifolds.manifolds.ot import verify_action_compat, verify_associativity, verify_leaves
from ot_manifolds.manifolds.subfield import (Inclusion, build_embedding, verify_embedding_compat,
                                             verify_inclusion, verify_subfield)

pytestmark = pytest.mark.slow

LIMIT = mpmath.ldexp(1, -60)


def _bound(result, key):
    return mpmath.mpf(result.evidence[key])


@pytest.mark.parametrize('name', ['plastic', 'cube_root_two', 'quartic', 'quintic', 'sextic'])
def test_unit_lattice(request, name):
    field = request.getfixturevalue(name)
    units = build_unit_system(field, unit_search(field, 5))
    assert len(units) > 0
    with field.policy.context():
        assert all(abs(b.mid) + b.rad < LIMIT for b in units.row_sums())
    report = dirichlet_rank_check(units)
    assert report.rank <= units.expected_rank
    if field.degree == 3:
        assert report.rank == units.expected_rank
        assert report.passed


@pytest.mark.parametrize('name', ['plastic_ot', 'quintic_ot'])
def test_action_and_group_law(request, name):
    ot = request.getfixturevalue(name)
    compat = verify_action_compat(ot, 1000, seed=0)
    assert compat.passed
    assert _bound(compat, 'max_deviation') < LIMIT
    associativity = verify_associativity(ot, 1000, seed=0)
    assert associativity.passed
    assert associativity.evidence['failures'] == 0


@pytest.mark.parametrize('name', ['plastic_ot', 'quintic_ot'])
def test_leaf_disjointness(request, name):
    result = verify_leaves(request.getfixturevalue(name), 200, seed=0)
    assert result.passed
    assert result.evidence['certified'] == 200
    assert result.evidence['failures'] == []


@pytest.mark.parametrize('name', ['plastic_ot', 'quintic_ot'])
def test_form_suite(request, name):
    ot = request.getfixturevalue(name)
    ddc, invariance, semipositivity, kernel = form_suite(
        ot, seed=0, invariance_words=100, semipositivity_samples=1000, ddc_count=10,
        ddc_bits=256, ddc_step_exponent=40, ddc_threshold_exponent=30)
    assert ddc.passed
    assert ddc.evidence['points'] == 10
    assert _bound(ddc, 'max_relative_error') < mpmath.ldexp(1, -30)
    assert invariance.passed
    assert _bound(invariance, 'max_deviation') < LIMIT
    assert semipositivity.passed
    assert _bound(semipositivity, 'min_value') >= -LIMIT
    assert kernel.passed
    assert kernel.evidence['kernel_dimension'] == ot.t


def test_sextic_embedding(sextic):
    theta = sextic.generator
    witness = verify_subfield(sextic, theta * theta)
    assert witness.k1.signature == (1, 1)

    inclusion = verify_inclusion(Inclusion(witness.k1, sextic, witness.eta), 200, seed=0)
    assert inclusion.passed

    surface = build_embedding(sextic, witness, coeff_bound=5)
    compat = verify_embedding_compat(surface, trials=100, seed=0)
    assert compat.passed
    assert _bound(compat, 'max_deviation') < LIMIT

    flagged = verify_subfield(sextic, theta ** 3)
    assert flagged.k1.signature == (2, 0)
    assert not flagged.usable
