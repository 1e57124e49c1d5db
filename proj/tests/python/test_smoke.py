import math

import numpy as np
import pytest

import edgectl


def test_spectrum_edge_pair():
    s = edgectl.spectrum()
    assert s["eigenvalues"].shape == (29,)
    assert s["eigenvectors"].shape == (29, 29)
    assert abs(s["edgeN_probability"] - 0.7474) < 0.005
    v = s["eigenvectors"]
    assert np.allclose(v.T @ v, np.eye(29), atol=1e-10)


def test_spectrum_matches_numpy():
    s = edgectl.spectrum({"n": 17})
    h = np.zeros((17, 17))
    for i in range(17):
        h[i, i] = 1.5 * math.cos(2 * math.pi * (i + 1) / 3 + 2 * math.pi / 3)
        if i + 1 < 17:
            h[i, i + 1] = h[i + 1, i] = -1.0
    assert np.allclose(s["eigenvalues"], np.linalg.eigvalsh(h), atol=1e-10)


def test_evolve_columns():
    t = edgectl.evolve({"t-max": 20, "stride": 100})
    assert t["time"][-1] == pytest.approx(20.0)
    assert abs(np.linalg.norm(t["final_state"]) - 1.0) < 1e-12
    assert len(t["f1"]) == len(t["time"])


def test_concurrence_forms_agree():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=7) + 1j * rng.normal(size=7)
    psi /= np.linalg.norm(psi)
    c = edgectl.concurrence(psi)
    assert c == pytest.approx(2 * abs(psi[0]) * abs(psi[-1]), abs=1e-12)
    a = sum(abs(psi[1:-1]) ** 2)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = a
    rho[1, 1] = abs(psi[0]) ** 2
    rho[2, 2] = abs(psi[-1]) ** 2
    rho[1, 2] = psi[0] * np.conj(psi[-1])
    rho[2, 1] = np.conj(rho[1, 2])
    assert edgectl.wootters_concurrence(rho) == pytest.approx(c, abs=1e-10)


def test_sweep_csv_and_errors():
    text = edgectl.sweep("theta", {"t-max": 10, "theta-points": 3})
    assert text.splitlines()[0] == "index,theta,fidelity_edge1_initial,fidelity_final,time_to_threshold"
    with pytest.raises(edgectl.ConfigError):
        edgectl.spectrum({"n": 2})
    with pytest.raises(edgectl.EdgeStateError):
        edgectl.spectrum({"v": 0})
