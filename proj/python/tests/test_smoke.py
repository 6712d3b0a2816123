import math

import numpy as np
import pytest

import relaxlmm


def test_catalogs():
    names = {m["name"] for m in relaxlmm.methods()}
    assert {"adams3", "ebdf3", "bdf2", "ssp32", "ssp43", "rk4"} <= names
    assert "kdv" in dict(relaxlmm.problems())


def test_oscillator_relaxation_conserves_energy():
    r = relaxlmm.run(problem="oscillator", method="adams3", dt=0.05, t_final=5.0, state=True)
    assert r.mode == "relaxation"
    assert r.eta.shape == (r.steps_taken + 1, 1)
    assert r.u.shape == (r.steps_taken + 1, 2)
    assert np.max(np.abs(r.eta[:, 0] - 0.5)) <= 1e-13
    np.testing.assert_allclose(np.sum(r.u**2, axis=1), 1.0, atol=1e-13)
    # The final state sits on the exact circle at the relaxed time.
    np.testing.assert_allclose(r.u[-1], [math.cos(r.t[-1]), math.sin(r.t[-1])], atol=1e-4)
    assert r.error < 1e-4


def test_adams2_uniform_coefficients():
    alpha, beta = relaxlmm.coefficients("adams2", [0.0, 1.0, 2.0])
    np.testing.assert_allclose(alpha, [0.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(beta, [-0.5, 1.5, 0.0], atol=1e-14)
    # Variable step: Ω = (0, 1, 1.5) integrates the linear interpolant over a half step.
    alpha, beta = relaxlmm.coefficients("adams2", [0.0, 2.0, 3.0])
    for ell in range(3):
        assert abs(relaxlmm.order_condition(alpha, beta, [0.0, 2.0, 3.0], ell)) <= 1e-13


def test_convergence_and_slope():
    rows = relaxlmm.convergence([0.1, 0.05, 0.025], problem="oscillator", method="adams3", t_final=5.0)
    assert [r.failure for r in rows] == ["", "", ""]
    eoc = rows[-1].eoc
    assert abs(eoc - 4.0) < 0.3
    slope = relaxlmm.loglog_slope([r.dt for r in rows], [r.error for r in rows])
    assert abs(slope - 4.0) < 0.3


def test_compare_projection_breaks_mass():
    runs = relaxlmm.compare(["projection", "relaxation"], problem="skew3", method="ssprk22", dt=0.1, t_final=0.1)
    proj, relax = runs
    expected = -math.sqrt(2.0) / math.sqrt(2.0 + 3e-4)
    assert abs(proj.eta[1, 1] - expected) <= 1e-12
    assert abs(relax.eta[1, 1] + 1.0) <= 1e-13


def test_errors():
    with pytest.raises(relaxlmm.ConfigError):
        relaxlmm.run(problem="nope")
    with pytest.raises(TypeError):
        relaxlmm.settings(bogus=1)
    with pytest.raises(relaxlmm.StepTooLarge, match="step 2"):
        relaxlmm.run(problem="exp_entropy", method="adams2", dt=0.05, t_final=1.0, gamma_offset=5.0)
