import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtense import linalg
from qtense.linalg import (
    NotHermitian, NotSquare, DimensionCap, evolution_operator, hermitian_eigen, is_projector,
    max_abs_diff,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)


def test_eigen_zero_matrix():
    w, v = hermitian_eigen(np.zeros((2, 2)))
    assert np.allclose(w, [0, 0])
    assert max_abs_diff(v, np.eye(2)) <= 1e-12


def test_eigen_sigma_x():
    # lambda^2 - 1 = 0
    w, v = hermitian_eigen(SX)
    assert np.allclose(w, [-1, 1], atol=1e-12)
    assert max_abs_diff(v @ np.diag(w) @ v.conj().T, SX) <= 1e-12


@pytest.mark.parametrize("d", [1, 3, 7])
def test_eigen_identity(d):
    w, v = hermitian_eigen(np.eye(d))
    assert np.allclose(w, 1)
    assert max_abs_diff(v @ np.diag(w) @ v.conj().T, np.eye(d)) <= 1e-12


def test_eigen_errors():
    with pytest.raises(NotHermitian):
        hermitian_eigen([[0, 1], [0, 0]])
    with pytest.raises(NotSquare):
        hermitian_eigen(np.zeros((2, 3)))
    with pytest.raises(DimensionCap):
        hermitian_eigen(np.eye(65))


def test_evolution_examples():
    assert max_abs_diff(evolution_operator(SX, 0.0), np.eye(2)) <= 1e-12
    assert max_abs_diff(evolution_operator(SX, np.pi), -np.eye(2)) <= 1e-12
    u = evolution_operator(np.diag([0.0, 1.0]), np.pi / 2)
    assert max_abs_diff(u, np.diag([1, -1j])) <= 1e-12


def test_evolution_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        evolution_operator([[0, 1], [2, 0]], 1.0)


def test_is_projector_examples():
    assert is_projector(np.eye(3))
    assert is_projector(np.diag([1, 0]))
    assert not is_projector([[0, 1], [0, 0]])
    assert not is_projector(np.diag([2, 0]))


@st.composite
def hermitian(draw, max_dim=16):
    d = draw(st.integers(1, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    return linalg.random_hermitian(d, np.random.default_rng(seed), scale=draw(st.floats(0.1, 5)))


@settings(max_examples=60, deadline=None)
@given(hermitian())
def test_reconstruction(m):
    w, v = hermitian_eigen(m)
    assert np.all(np.diff(w) >= 0)
    assert max_abs_diff(v @ np.diag(w) @ v.conj().T, m) <= 1e-9
    assert linalg.is_unitary(v, 1e-9)


@settings(max_examples=60, deadline=None)
@given(hermitian(), st.floats(-10, 10), st.floats(-10, 10))
def test_unitarity_and_group_law(m, s, t):
    us, ut = evolution_operator(m, s), evolution_operator(m, t)
    assert linalg.is_unitary(ut, 1e-9)
    assert max_abs_diff(us @ ut, evolution_operator(m, s + t)) <= 1e-9
    assert max_abs_diff(ut @ evolution_operator(m, -t), np.eye(len(m))) <= 1e-9
