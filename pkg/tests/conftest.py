import math

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_pure(rng):
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    return z / np.linalg.norm(z)


def random_two_qubit_pair(fidelity, rng, product=False):
    """Two bipartite 2x2 amplitude matrices with the requested overlap."""
    if product:
        w = random_pure(rng)
        chi1 = random_pure(rng)
        u = random_pure(rng)
        u = u - np.vdot(chi1, u) * chi1
        u = u / np.linalg.norm(u)
        chi2 = fidelity * chi1 + math.sqrt(1.0 - fidelity**2) * u
        return np.outer(w, chi1), np.outer(w, chi2)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    a = a / np.linalg.norm(a)
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = b - np.vdot(a, b) * a
    b = b / np.linalg.norm(b)
    phase = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    return a, fidelity * a + math.sqrt(1.0 - fidelity**2) * phase * b
