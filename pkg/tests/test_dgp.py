import numpy as np
import pytest

import paneldml as pm
from paneldml.dgp import _draw_components


def test_rho_zero_decorrelates_fixed_effect():
    c = _draw_components(pm.DgpParams(n_obs=10_000, t_per=2, dim_x=3, rho=0.0, seed=5))
    r = np.corrcoef(c["alpha"], c["a"])[0, 1]
    assert abs(r) < 0.03


def test_rho_one_copies_latent_factor():
    c = _draw_components(pm.DgpParams(n_obs=500, t_per=2, dim_x=3, rho=1.0, seed=2))
    np.testing.assert_array_equal(c["alpha"], c["a"])


def test_structural_residual_is_standard_normal():
    params = pm.DgpParams(n_obs=10_000, t_per=10, dim_x=3, theta=0.5, seed=3)
    c = _draw_components(params)
    resid = c["y"] - c["d"] * params.theta - c["g0"] - c["alpha"][:, None]
    assert abs(resid.mean()) < 0.02
    assert abs(resid.std() - 1.0) < 0.02


def test_fixed_effect_variance():
    for rho in (0.0, 0.5, 0.8, 1.0):
        c = _draw_components(pm.DgpParams(n_obs=10_000, t_per=2, dim_x=3, rho=rho, seed=4))
        expected = rho**2 * 3.0 + (1.0 - rho**2) * 1.0
        assert np.var(c["alpha"]) == pytest.approx(expected, rel=0.10)


def test_seed_determinism():
    p = pm.DgpParams(n_obs=20, t_per=3, dim_x=4, seed=11)
    a = pm.make_plpr_data(p)
    b = pm.make_plpr_data(p)
    np.testing.assert_array_equal(a.y, b.y)
    np.testing.assert_array_equal(a.x, b.x)
    c = pm.make_plpr_data(pm.DgpParams(n_obs=20, t_per=3, dim_x=4, seed=12))
    assert not np.array_equal(a.y, c.y)


def test_output_is_valid_panel():
    data = pm.make_plpr_data(pm.DgpParams(n_obs=13, t_per=4, dim_x=5, seed=6))
    assert data.n_obs == 13 * 4
    assert data.n_subjects == 13
    assert data.p == 5
    assert data.names.x == ("X1", "X2", "X3", "X4", "X5")
    info = pm.panel_info(data)
    assert info.n_groups == 13


def test_param_validation():
    with pytest.raises(ValueError):
        pm.DgpParams(n_obs=0)
    with pytest.raises(ValueError):
        pm.DgpParams(t_per=1)
    with pytest.raises(ValueError):
        pm.DgpParams(dim_x=2)
    with pytest.raises(ValueError):
        pm.DgpParams(rho=1.2)
