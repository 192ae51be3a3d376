import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eigenform_lab import (
    DirichletForm,
    energy,
    is_harmonic_at,
    is_irreducible,
    laplacian,
    support_graph,
)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)


def test_energy_constant_is_zero(gasket_eigenform):
    assert energy(gasket_eigenform, [3.7, 3.7, 3.7]) == 0.0


def test_energy_gasket_unit(gasket_eigenform):
    assert energy(gasket_eigenform, [1.0, 0.0, 0.0]) == pytest.approx(2.0)


@given(u=st.lists(finite, min_size=3, max_size=3), c=finite)
def test_energy_additive_constant_invariance(u, c):
    form = DirichletForm(3, {(0, 1): 0.5, (0, 2): 2.0, (1, 2): 1.5})
    u = np.array(u)
    assert energy(form, u + c) == pytest.approx(energy(form, u), abs=1e-9)


@given(u=st.lists(finite, min_size=3, max_size=3), c=st.floats(min_value=0, max_value=10))
def test_energy_homogeneous_in_coefficients(u, c):
    form = DirichletForm(3, {(0, 1): 1.0, (0, 2): 2.0, (1, 2): 0.25})
    assert energy(form.scaled(c), u) == pytest.approx(c * energy(form, u), rel=1e-12, abs=1e-12)


def test_laplacian_constant(gasket_eigenform):
    assert np.allclose(laplacian(gasket_eigenform, [2.0, 2.0, 2.0]), 0.0)


def test_laplacian_gasket_unit(gasket_eigenform):
    assert np.allclose(laplacian(gasket_eigenform, [1.0, 0.0, 0.0]), [-2.0, 1.0, 1.0])


def test_laplacian_row_sums_vanish():
    rng = np.random.default_rng(2)
    form = DirichletForm(4, {(0, 1): 1.2, (1, 2): 0.4, (2, 3): 2.0, (0, 3): 0.7})
    for _ in range(20):
        u = rng.normal(size=4)
        assert laplacian(form, u).sum() == pytest.approx(0.0, abs=1e-12)


def test_laplacian_sign_pattern_irreducible():
    # nonconstant data must push in both directions somewhere
    rng = np.random.default_rng(3)
    form = DirichletForm(3, {(0, 1): 1.0, (0, 2): 2.0})
    for _ in range(50):
        u = rng.normal(size=3)
        if np.ptp(u) < 1e-9:
            continue
        lap = laplacian(form, u)
        assert lap.max() > 0 and lap.min() < 0


def test_laplacian_extrema_signs_positive_form():
    rng = np.random.default_rng(4)
    form = DirichletForm.ones(4)
    for _ in range(50):
        u = rng.normal(size=4)
        if np.ptp(u) < 1e-9:
            continue
        lap = laplacian(form, u)
        assert lap[np.argmin(u)] > 0
        assert lap[np.argmax(u)] < 0


def test_support_graph_and_irreducibility(gasket_eigenform, tree_eigenform):
    assert support_graph(gasket_eigenform).sorted_edges() == [(0, 1), (0, 2), (1, 2)]
    assert is_irreducible(gasket_eigenform)

    single = DirichletForm(3, {(0, 1): 1.0})
    assert support_graph(single).sorted_edges() == [(0, 1)]
    assert not is_irreducible(single)

    assert support_graph(tree_eigenform).sorted_edges() == [(0, 1), (0, 2)]
    assert is_irreducible(tree_eigenform)


def test_support_graph_clamps_roundoff():
    form = DirichletForm(3, {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1e-14})
    assert support_graph(form).sorted_edges() == [(0, 1), (0, 2)]


def test_is_harmonic_at(gasket_eigenform):
    assert is_harmonic_at(gasket_eigenform, [5.0, 5.0, 5.0], 1)
    assert not is_harmonic_at(gasket_eigenform, [1.0, 0.0, 0.0], 0)


def test_minimum_not_harmonic_under_positive_form():
    rng = np.random.default_rng(5)
    form = DirichletForm.ones(3)
    for _ in range(30):
        u = rng.normal(size=3)
        if np.ptp(u) < 1e-6:
            continue
        assert not is_harmonic_at(form, u, int(np.argmin(u)))


def test_rejects_negative_coefficient():
    with pytest.raises(ValueError):
        DirichletForm(3, {(0, 1): -1.0})


def test_rejects_duplicate_pair():
    with pytest.raises(ValueError, match="duplicate"):
        DirichletForm(3, [(0, 1, 1.0), (1, 0, 2.0)])


def test_from_matrix_rejects_nonzero_diagonal():
    with pytest.raises(ValueError, match="diagonal"):
        DirichletForm.from_matrix(np.array([[1.0, 0.5], [0.5, 0.0]]))


def test_vector_order_and_roundtrip():
    form = DirichletForm(3, {(0, 1): 1.0, (1, 2): 3.0})
    assert np.allclose(form.vector(), [1.0, 0.0, 3.0])
    again = DirichletForm.from_matrix(form.matrix())
    assert np.allclose(again.vector(), form.vector())
    assert form.coefficient_items() == [(0, 1, 1.0), (1, 2, 3.0)]
