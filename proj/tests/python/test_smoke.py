"""Smoke tests of the python module: a thin pass over the bound surface."""

import json
import math

import numpy as np
import pytest

import qgibbs


def default_params(n=5):
    h = qgibbs.SpectralField(n)
    h.set_coeff(1, 1, 1.0)
    h.set_coeff(2, 1, 0.5)
    return qgibbs.GibbsParams(alpha=1.0, mu=1.0, beta=1.0, topography=h, N=n)


def test_index_set():
    s = qgibbs.make_index_set(5)
    assert set(s["reduced"]) == {(0, 1), (0, 2), (1, 1), (1, 2), (2, 1)}
    assert len(s["full"]) == 8


def test_kernel_closed_form_spot_value():
    phi = qgibbs.sin_y_field(12)
    h = qgibbs.hphi_kernel(phi, 12)
    assert h.entry(1, 2, -1, 1) == pytest.approx(3j / 40, abs=1e-15)
    assert h.entry(1, 1, 1, 1) == 0


def test_mode_variance_and_sampling_determinism():
    p = qgibbs.GibbsParams(2.0, 3.0, 1.0, qgibbs.SpectralField(5), 5)
    assert qgibbs.mode_variance(1, 1, p) == pytest.approx(0.2)
    a = qgibbs.sample_state(default_params(), seed=7, member=3)
    b = qgibbs.sample_state(default_params(), seed=7, member=3)
    assert a.U == b.U
    assert a.omega.coeff(1, 1) == b.omega.coeff(1, 1)


def test_mutual_oracle_small():
    n = 8
    w = qgibbs.random_smooth_field(n, seed=4)
    phi = qgibbs.random_smooth_field(n, seed=5)
    lhs = qgibbs.pair_tensor(w, qgibbs.hphi_kernel_truncated(phi, n))
    jac = qgibbs.jacobian_triad(qgibbs.laplacian_inverse(w), w, n)
    rhs = qgibbs.duality_product(jac, phi)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_grid_synthesis_shape_and_value():
    f = qgibbs.SpectralField(5)
    f.set_coeff(0, 1, 1.0)
    g = qgibbs.synthesize_on_grid(f, 16, 32)
    assert g.shape == (32, 16)
    y = -math.pi + 2 * math.pi * 8 / 32
    assert g[8, 0] == pytest.approx(math.sin(y) / (2 * math.pi))


def test_integration_conserves_pseudoenergy():
    p = default_params()
    s0 = qgibbs.sample_state(p, seed=1)
    traj = qgibbs.integrate(s0, p, dt=1e-2, t_final=0.2)
    s_start = qgibbs.pseudoenergy(traj.states[0], p)
    s_end = qgibbs.pseudoenergy(traj.states[-1], p)
    assert s_end == pytest.approx(s_start, rel=1e-7)


def test_liouville_divergence_small():
    p = default_params()
    s = qgibbs.sample_state(p, seed=2)
    est = qgibbs.liouville_divergence(s, p)
    assert abs(est["normalized"]) < 1e-6


def test_run_experiment_report_is_json():
    p = default_params()
    ok, summary = qgibbs.run_experiment(
        "regularity", p, seed=1, threads=2,
        overrides={"regularity.m_list": "100,1000,10000"},
    )
    doc = json.loads(summary)
    assert doc["experiment"] == "regularity"
    assert isinstance(ok, bool)
