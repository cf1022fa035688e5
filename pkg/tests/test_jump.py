import numpy as np
import pytest

from ssflow import (
    GasModel,
    StraightShock,
    UniformState,
    critical_density,
    entropy_admissible,
    incident_shock,
    rh_residual,
)
from ssflow.errors import SearchError
from ssflow.jump import incident_velocity


GAS2 = GasModel(2.0)


def test_incident_shock_spot_values():
    inc = incident_shock(GAS2, 1.0, 2.0)
    assert inc.u1 == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-14)
    assert inc.xi0 == pytest.approx(2.0 * np.sqrt(2.0 / 3.0), rel=1e-14)
    assert not inc.degenerate


def test_incident_shock_degenerate_and_invalid():
    inc = incident_shock(GAS2, 1.0, 1.0)
    assert inc.degenerate and inc.u1 == 0.0 and np.isnan(inc.xi0)
    with pytest.raises(ValueError):
        incident_shock(GAS2, 2.0, 1.0)


def test_incident_shock_below_attachment_threshold():
    # u1 < c1 selects the always-unattached regime for the reference densities
    inc = incident_shock(GAS2, 1.0, 2.0)
    assert inc.u1 < GAS2.sound_speed(2.0)
    assert inc.rho_c > 2.0


def test_xi0_double_formula_identity():
    rng = np.random.default_rng(42)
    for _ in range(100):
        g = 1.0 + 2.0 * rng.random() + 1e-4
        gas = GasModel(g)
        r0 = 0.2 + 3.0 * rng.random()
        r1 = r0 * (1.0 + 2.0 * rng.random()) + 1e-9
        inc = incident_shock(gas, r0, r1)
        c0sq = gas.sound_speed_sq(r0)
        c1sq = gas.sound_speed_sq(r1)
        xi0_alt = r1 * np.sqrt(2.0 * (c1sq - c0sq) / ((g - 1.0) * (r1 ** 2 - r0 ** 2)))
        assert abs(inc.xi0 - xi0_alt) <= 1e-12 * abs(xi0_alt)


def test_degenerate_limit_continuity():
    for d in (1e-4, 1e-6, 1e-8):
        inc = incident_shock(GAS2, 1.0, 1.0 + d)
        assert inc.u1 < 2.0 * np.sqrt(d)
        assert inc.xi0 * d == pytest.approx((1.0 + d) * inc.u1, rel=1e-12)
        assert inc.xi0 * d < 3.0 * np.sqrt(d)


def test_critical_density_closed_form():
    # gamma = 2, rho0 = 1: u1 = c1 reduces to rho^2 - 5 rho + 2 = 0
    rc = critical_density(GAS2, 1.0)
    assert rc == pytest.approx((5.0 + np.sqrt(17.0)) / 2.0, rel=1e-10)
    # sign of u1 - c1 flips across the root
    f = lambda r1: incident_velocity(GAS2, 1.0, r1) - GAS2.sound_speed(r1)
    assert f(rc * 0.999) < 0 < f(rc * 1.001)


def test_critical_density_subsonic_just_above_rho0():
    gas = GasModel(1.4)
    assert incident_velocity(gas, 1.0, 1.0 + 1e-6) < gas.sound_speed(1.0 + 1e-6)


def test_velocity_to_sound_ratio_monotone():
    gas = GasModel(1.6)
    r1 = np.linspace(1.001, 50.0, 400)
    ratio = np.array([incident_velocity(gas, 1.0, r) / gas.sound_speed(r) for r in r1])
    assert np.all(np.diff(ratio) > 0)


def test_critical_density_bracket_failure():
    # gamma = 3 makes u1/c1 -> 1 from below; no critical density exists
    with pytest.raises(SearchError):
        critical_density(GasModel(3.0), 1.0, upper_factor=1e6)


def _states01():
    inc = incident_shock(GAS2, 1.0, 2.0)
    s0 = UniformState(u=0.0, v=0.0, k=0.0, rho=1.0)
    s1 = UniformState(u=inc.u1, v=0.0, k=-inc.u1 * inc.xi0, rho=2.0)
    return inc, s0, s1


def test_rh_residual_identical_states():
    _, s0, _ = _states01()
    rng = np.random.default_rng(1)
    for _ in range(10):
        p = rng.normal(size=2)
        dphi, dflux = rh_residual(GAS2, None, s0, s0, p, (1.0, 0.0))
        assert dphi == 0.0 and dflux == 0.0


def test_rh_residual_on_incident_shock():
    inc, s0, s1 = _states01()
    for eta in (-2.0, 0.0, 0.7, 5.0):
        dphi, dflux = rh_residual(GAS2, None, s0, s1, (inc.xi0, eta), (1.0, 0.0))
        assert abs(dphi) < 1e-13 and abs(dflux) < 1e-13
    dphi, _ = rh_residual(GAS2, None, s0, s1, (inc.xi0 + 0.1, 0.0), (1.0, 0.0))
    assert abs(dphi) > 1e-3


def test_rh_residual_rejects_non_unit_normal():
    _, s0, s1 = _states01()
    with pytest.raises(ValueError):
        rh_residual(GAS2, None, s0, s1, (0.0, 0.0), (2.0, 0.0))


def test_flux_jump_constant_along_phi_level_line():
    # Two uniform states sharing B0 with [phi] = 0 on a line: the flux jump is
    # the same at every point of that line.
    from ssflow import BernoulliData

    gas = GasModel(1.8)
    bern = BernoulliData.from_constant(gas, 2.0)
    rng = np.random.default_rng(9)
    for _ in range(20):
        a = UniformState.from_bernoulli(gas, bern, *rng.normal(scale=0.4, size=3))
        b = UniformState.from_bernoulli(gas, bern, *rng.normal(scale=0.4, size=3))
        try:
            line = StraightShock.between(a, b)
        except ValueError:
            continue
        nu = np.array(line.normal)
        tau = np.array([-nu[1], nu[0]])
        p = np.array(line.point)
        fluxes = [rh_residual(gas, bern, a, b, p + s * tau, nu)[1] for s in (-3.0, -1.0, 0.0, 2.0)]
        assert np.allclose(fluxes, fluxes[0], rtol=0, atol=1e-12)


def test_entropy_admissibility():
    inc, s0, s1 = _states01()
    assert entropy_admissible(GAS2, s0, s1) is True
    assert entropy_admissible(GAS2, s1, s0) is False
    with pytest.raises(ValueError):
        entropy_admissible(GAS2, s0, s0)  # no jump line at all
    # connected check: perturbing the potential breaks the R-H link
    bad = UniformState(u=s1.u, v=0.0, k=s1.k + 0.05, rho=1.7)
    with pytest.raises(ValueError):
        entropy_admissible(GAS2, s0, bad)
