import numpy as np
import pytest

from ssflow import (
    DetachedError,
    GasModel,
    UniformState,
    WedgeGeometry,
    critical_angles,
    detachment_angle,
    diffraction_critical_angle,
    incident_shock,
    pm_angles,
    pm_states,
    solve_normal_reflection,
    sonic_angle,
    state2_regular_reflection,
    steady_shock_polar,
)
from ssflow.local import deflection_roots, downstream_density, incident_states

GAS2 = GasModel(2.0)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def state2_system_residuals(data, state):
    """Residuals of the defining algebraic system of state (2).

    (a) slip along the wedge line, (b) potential match at P0, (c) mass-flux
    jump across the straight shock at two points, (d) Bernoulli closure.
    """
    gas, bern = data.gas, data.bern
    s1 = data.state1
    p0 = np.array(data.p0)
    tw = data.theta_w
    n_w = np.array([-np.sin(tw), np.cos(tw)])
    res = {}
    res["slip"] = np.array([state.u, state.v]) @ n_w
    res["phi_p0"] = s1.value(*p0) - state.value(*p0)
    du = np.array([s1.u - state.u, s1.v - state.v])
    nu = du / np.hypot(*du)
    tau = np.array([-nu[1], nu[0]])
    for lab, x in (("flux_p0", p0), ("flux_off", p0 + 0.5 * tau)):
        g1 = s1.gradient(*x)
        g2 = state.gradient(*x)
        res[lab] = s1.rho * (g1[0] * nu[0] + g1[1] * nu[1]) - state.rho * (
            g2[0] * nu[0] + g2[1] * nu[1])
        res["phi_" + lab] = s1.value(*x) - state.value(*x)
    res["bernoulli"] = state.bernoulli_residual(gas, bern)
    return res


def normal_reflection_quadratic(gas, rho0, rho1):
    """Closed-form oracle for gamma = 2: the density rise D = rho2 - rho1
    solves D^2 - (w^2/2) D - rho1 w^2 = 0 with w = u1."""
    assert gas.gamma == 2.0
    inc = incident_shock(gas, rho0, rho1)
    w2 = inc.u1 ** 2
    d = (w2 / 2 + np.sqrt(w2 ** 2 / 4 + 4 * rho1 * w2)) / 2
    rho2 = rho1 + d
    xi_bar = -rho1 * inc.u1 / d
    return rho2, xi_bar


# ---------------------------------------------------------------------------
# state (2)
# ---------------------------------------------------------------------------

def test_state2_two_roots_at_80deg():
    d = state2_regular_reflection(GAS2, 1.0, 2.0, np.deg2rad(80.0))
    assert d.classification == "supersonic"
    # frozen from the brute-force scan oracle (grid scan over shock angle and
    # density, refined by bisection)
    assert d.weak.rho == pytest.approx(3.323831454556, rel=1e-9)
    assert d.strong.rho == pytest.approx(45.132348412944, rel=1e-9)
    assert d.strong.rho > d.weak.rho > 2.0


def test_state2_system_residuals_both_roots():
    rng = np.random.default_rng(8)
    for _ in range(25):
        g = 1.2 + 1.6 * rng.random()
        gas = GasModel(g)
        r0 = 0.4 + rng.random()
        r1 = r0 * (1.3 + rng.random())
        td = detachment_angle(gas, r0, r1)
        tw = td + (np.pi / 2 - td - 1e-3) * rng.random() + 5e-4
        d = state2_regular_reflection(gas, r0, r1, tw)
        if d.weak is None:
            continue
        for st in filter(None, (d.weak, d.strong)):
            res = state2_system_residuals(d, st)
            for name, val in res.items():
                assert abs(val) < 1e-9, (name, val, g, r0, r1, tw)


def test_state2_weak_matches_normal_reflection_near_pi_half():
    nr = solve_normal_reflection(GAS2, 1.0, 2.0)
    d = state2_regular_reflection(GAS2, 1.0, 2.0, np.pi / 2 - 1e-4)
    assert abs(d.weak.u - 0.0) < 1e-3
    assert abs(d.weak.v - 0.0) < 1e-3
    assert abs(d.weak.rho - nr.rho2) < 1e-3


def test_state2_detached_below_detachment():
    td = detachment_angle(GAS2, 1.0, 2.0)
    d = state2_regular_reflection(GAS2, 1.0, 2.0, td - 0.05)
    assert d.classification == "detached"
    assert d.weak is None and d.strong is None


def test_state2_weak_root_continuity_in_theta():
    td = detachment_angle(GAS2, 1.0, 2.0)
    ths = np.linspace(td + 1e-3, np.pi / 2 - 1e-4, 80)
    vals = []
    for t in ths:
        d = state2_regular_reflection(GAS2, 1.0, 2.0, t)
        vals.append((d.weak.u, d.weak.v, d.weak.rho))
    vals = np.array(vals)
    steps = np.abs(np.diff(vals, axis=0)).max(axis=1)
    assert steps.max() < 0.35  # no jumps between adjacent samples


def test_state2_input_validation():
    with pytest.raises(ValueError):
        state2_regular_reflection(GAS2, 2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        state2_regular_reflection(GAS2, 1.0, 2.0, np.pi / 2)


# ---------------------------------------------------------------------------
# critical angles
# ---------------------------------------------------------------------------

def test_angle_ordering_and_frozen_values():
    td = detachment_angle(GAS2, 1.0, 2.0)
    ts = sonic_angle(GAS2, 1.0, 2.0, theta_d=td)
    assert 0 < td < ts < np.pi / 2
    # frozen from the bisection runs pinned by this suite
    assert td == pytest.approx(0.9496544134, abs=1e-8)
    assert ts == pytest.approx(0.9723073119, abs=1e-8)


def test_sonic_angle_defining_equation():
    ts = sonic_angle(GAS2, 1.0, 2.0)
    d = state2_regular_reflection(GAS2, 1.0, 2.0, ts)
    assert abs(d.mach_weak - 1.0) < 1e-8


def test_roots_coincide_at_detachment():
    td = detachment_angle(GAS2, 1.0, 2.0)
    gaps = []
    for eps in (1e-6, 1e-8, 1e-10):
        d = state2_regular_reflection(GAS2, 1.0, 2.0, td + eps)
        gaps.append(d.strong.rho - d.weak.rho if d.strong is not None else 0.0)
    # square-root closing of the root pair toward tangency
    assert gaps[0] < 6e-3 and gaps[1] < 6e-4 and gaps[2] < 7e-5
    assert gaps[0] > gaps[1] > gaps[2]


def test_classification_single_crossing():
    from ssflow.local import reflection_weak_grid

    td = detachment_angle(GAS2, 1.0, 2.0)
    ths = np.linspace(td + 1e-5, np.pi / 2 - 1e-4, 2000)
    out = reflection_weak_grid(GAS2, 1.0, 2.0, ths)
    assert np.all(out["exists"])
    signs = np.sign(out["mach_weak"] - 1.0)
    crossings = np.sum(signs[:-1] != signs[1:])
    assert crossings == 1


def test_weak_grid_matches_scalar_solver():
    td = detachment_angle(GAS2, 1.0, 2.0)
    ths = np.linspace(td + 5e-3, np.pi / 2 - 1e-3, 7)
    from ssflow.local import reflection_weak_grid

    out = reflection_weak_grid(GAS2, 1.0, 2.0, ths)
    for i, t in enumerate(ths):
        d = state2_regular_reflection(GAS2, 1.0, 2.0, t)
        assert out["rho_weak"][i] == pytest.approx(d.weak.rho, rel=1e-10)
        assert out["mach_weak"][i] == pytest.approx(d.mach_weak, rel=1e-9)
        assert out["u_weak"][i] == pytest.approx(d.weak.u, abs=1e-9)
        assert out["v_weak"][i] == pytest.approx(d.weak.v, abs=1e-9)
        if d.strong is not None:
            assert out["rho_strong"][i] == pytest.approx(d.strong.rho, rel=1e-8)


def test_angle_ordering_random_parameters():
    rng = np.random.default_rng(21)
    for _ in range(6):
        gas = GasModel(1.2 + 1.5 * rng.random())
        r0 = 0.5 + rng.random()
        r1 = r0 * (1.4 + 1.2 * rng.random())
        ca = critical_angles(gas, r0, r1)
        assert 0 < ca.detachment < ca.sonic < np.pi / 2


# ---------------------------------------------------------------------------
# diffraction critical angle
# ---------------------------------------------------------------------------

def diffraction_angle_closed_form(gas, rho0, rho1):
    """Oracle: the circles' intersection point placed on the wedge ray."""
    inc = incident_shock(gas, rho0, rho1)
    c0 = gas.sound_speed(rho0)
    c1 = gas.sound_speed(rho1)
    x = (inc.u1 ** 2 + c0 ** 2 - c1 ** 2) / (2 * inc.u1)
    y = -np.sqrt(c0 ** 2 - x ** 2)
    return np.pi + np.arctan2(y, x)


def test_diffraction_critical_angle_against_closed_form():
    tc = diffraction_critical_angle(GAS2, 1.0, 2.0)
    assert tc == pytest.approx(diffraction_angle_closed_form(GAS2, 1.0, 2.0), abs=1e-8)
    assert 0 < tc < np.pi


def test_diffraction_contact_points():
    inc = incident_shock(GAS2, 1.0, 2.0)
    c0, c1, u1 = GAS2.sound_speed(1.0), GAS2.sound_speed(2.0), inc.u1

    def contact(t):
        b = u1 * np.cos(t)
        r = np.sqrt(b * b - (u1 ** 2 - c1 ** 2))
        return min(x for x in (-b - r, -b + r) if x > 0)

    tc = diffraction_critical_angle(GAS2, 1.0, 2.0)
    assert abs(contact(tc) - c0) < 1e-8          # coincide at the critical angle
    assert contact(tc + 0.1) - c0 > 1e-3         # distinct above it


# ---------------------------------------------------------------------------
# normal reflection
# ---------------------------------------------------------------------------

def test_normal_reflection_reference_values():
    nr = solve_normal_reflection(GAS2, 1.0, 2.0)
    assert nr.rho2 == pytest.approx(10.0 / 3.0, rel=1e-10)
    assert nr.xi_bar == pytest.approx(-np.sqrt(1.5), rel=1e-10)
    rho2_o, xi_o = normal_reflection_quadratic(GAS2, 1.0, 2.0)
    assert nr.rho2 == pytest.approx(rho2_o, rel=1e-12)
    assert nr.xi_bar == pytest.approx(xi_o, rel=1e-12)
    assert nr.rho2 > 2.0 > 1.0


def test_normal_reflection_rh_conditions():
    nr = solve_normal_reflection(GAS2, 1.0, 2.0)
    from ssflow import rh_residual
    for eta in (0.0, 1.3, -2.0):
        dphi, dflux = rh_residual(GAS2, nr.bern, nr.state1, nr.state2,
                                  (nr.xi_bar, eta), (1.0, 0.0))
        assert abs(dphi) < 1e-12 and abs(dflux) < 1e-12
    assert abs(nr.state2.bernoulli_residual(GAS2, nr.bern)) < 1e-12


def test_normal_reflection_degenerate_limit():
    nr = solve_normal_reflection(GAS2, 1.0, 1.0)
    assert nr.rho2 == 1.0
    assert nr.xi_bar == pytest.approx(-GAS2.sound_speed(1.0))
    for d in (1e-3, 1e-5):
        nr = solve_normal_reflection(GAS2, 1.0, 1.0 + d)
        assert abs(nr.rho2 - 1.0) < 5 * d
        assert abs(nr.xi_bar + GAS2.sound_speed(1.0)) < 5 * d


# ---------------------------------------------------------------------------
# steady polar and ramp states
# ---------------------------------------------------------------------------

def polar_rh_residuals(gas, polar):
    """Steady R-H residuals for every sample: tangential continuity is built
    into the construction, so check mass flux and Bernoulli in the normal
    direction plus the entropy ordering."""
    out = []
    for b, u, v, rho in zip(polar.beta, polar.u, polar.v, polar.rho):
        nu = np.array([np.sin(b), -np.cos(b)])
        n_up = polar.u_inf * np.sin(b)
        n_dn = np.array([u, v]) @ nu
        tau = np.array([np.cos(b), np.sin(b)])
        t_up = polar.u_inf * tau[0]
        t_dn = np.array([u, v]) @ tau
        r_mass = rho * n_dn - polar.rho_inf * n_up
        r_bern = (gas.enthalpy(rho) + n_dn ** 2 / 2) - (
            gas.enthalpy(polar.rho_inf) + n_up ** 2 / 2)
        out.append((r_mass, r_bern, t_dn - t_up))
    return np.array(out)


def test_polar_endpoints_and_rh():
    polar = steady_shock_polar(GAS2, 2.0, 1.0, n_samples=400)
    # normal-shock endpoint: v = 0, u = rho_inf u_inf / rho_d with closed-form
    # density 1 + sqrt(3) for gamma = 2, u_inf = 2, rho_inf = 1
    assert polar.v[-1] == pytest.approx(0.0, abs=1e-14)
    assert polar.rho[-1] == pytest.approx(1.0 + np.sqrt(3.0), rel=1e-12)
    assert polar.u_normal == pytest.approx(2.0 / (1.0 + np.sqrt(3.0)), rel=1e-12)
    assert polar.u_normal < polar.u_inf
    # Mach-angle endpoint: vanishing strength
    assert polar.u[0] == pytest.approx(polar.u_inf, rel=1e-12)
    assert abs(polar.v[0]) < 1e-12
    res = polar_rh_residuals(GAS2, polar)
    assert np.max(np.abs(res)) < 1e-10
    assert np.all(polar.rho >= polar.rho_inf - 1e-12)


def test_polar_rejects_subsonic_inflow():
    with pytest.raises(ValueError):
        steady_shock_polar(GAS2, 0.9, 1.0)


def test_pm_states_identity_and_limits():
    st = pm_states(GAS2, 2.0, 1.0, 0.25)
    g = GAS2.gamma
    lhs = st.weak.rho ** (g - 1)
    rhs = st.rho_inf ** (g - 1) + (g - 1) / 2 * (st.u_inf ** 2 - st.weak.u ** 2 - st.weak.v ** 2)
    assert abs(lhs - rhs) < 1e-10
    assert st.weak.v / st.weak.u == pytest.approx(np.tan(0.25), rel=1e-12)
    assert st.strong.rho > st.weak.rho
    # vanishing ramp: weak root tends to the incoming state
    st = pm_states(GAS2, 2.0, 1.0, 1e-5)
    assert abs(st.weak.u - 2.0) < 1e-3 and abs(st.weak.v) < 1e-3


def test_pm_state1_is_wall_frame_normal_shock():
    th = 0.3
    st = pm_states(GAS2, 2.0, 1.0, th)
    s1 = st.state1
    assert s1.v == 0.0
    assert s1.u == pytest.approx(2.0 * np.cos(th), rel=1e-13)
    # R-H across {eta = eta1} against the rotated incoming stream
    inc = UniformState(u=2.0 * np.cos(th), v=-2.0 * np.sin(th), k=0.0, rho=1.0)
    from ssflow import rh_residual
    for xi in (-1.0, 0.4, 3.0):
        dphi, dflux = rh_residual(GAS2, st.bern, inc, s1, (xi, st.eta1), (0.0, -1.0))
        assert abs(dphi) < 1e-12 and abs(dflux) < 1e-12
    assert abs(s1.bernoulli_residual(GAS2, st.bern)) < 1e-12


def test_pm_weak_sonic_transition_matches_sonic_angle():
    ts, td = pm_angles(GAS2, 2.0, 1.0)
    for dt, expect_super in ((-1e-3, True), (1e-3, False)):
        st = pm_states(GAS2, 2.0, 1.0, ts + dt)
        speed = np.hypot(st.weak.u, st.weak.v)
        assert bool(speed > GAS2.sound_speed(st.weak.rho)) == expect_super


def test_pm_angles_ordering_and_tangency():
    ts, td = pm_angles(GAS2, 2.0, 1.0)
    assert 0 < ts < td < np.pi / 2
    assert ts == pytest.approx(0.3398369095, abs=1e-8)
    assert td == pytest.approx(0.3939204991, abs=1e-8)
    # tangency: the intersection pair merges at the detachment angle
    r = deflection_roots(GAS2, np.array([2.0, 0.0]), 1.0,
                         np.array([-np.sin(td - 1e-10), np.cos(td - 1e-10)]))
    assert len(r) >= 1
    if len(r) == 2:
        assert r[1].rho_down - r[0].rho_down < 1e-4
    with pytest.raises(DetachedError):
        pm_states(GAS2, 2.0, 1.0, td + 1e-3)


def test_pm_detachment_vanishes_at_sonic_inflow():
    prev = np.inf
    for m in (1.01, 1.001):
        ts, td = pm_angles(GAS2, m, 1.0)
        assert td < prev and td < 0.01
        prev = td


def test_pm_freestream_criterion_flag():
    ts_state, _ = pm_angles(GAS2, 2.0, 1.0, criterion="state")
    ts_free, _ = pm_angles(GAS2, 2.0, 1.0, criterion="freestream")
    assert ts_state != ts_free  # the two circles differ away from M = 1
    # oracle: dense polar sampling; theta_s is the ray angle through the
    # polar point sitting on the circle of the chosen radius
    polar = steady_shock_polar(GAS2, 2.0, 1.0, n_samples=200_000)
    speed = np.hypot(polar.u, polar.v)
    for crit, ts in (("freestream", ts_free), ("state", ts_state)):
        cref = (np.full_like(speed, GAS2.sound_speed(1.0)) if crit == "freestream"
                else GAS2.sound_speed(polar.rho))
        g = speed - cref
        i = np.where(g[:-1] * g[1:] < 0)[0][0]
        w = g[i] / (g[i] - g[i + 1])
        u = (1 - w) * polar.u[i] + w * polar.u[i + 1]
        v = (1 - w) * polar.v[i] + w * polar.v[i + 1]
        assert np.arctan2(v, u) == pytest.approx(ts, abs=1e-7)


def test_polar_closure_against_dense_sampling():
    # Independent oracle for the weak intersection: dense polar sampling plus
    # a local linear solve of v = u tan(theta).
    th = 0.22
    polar = steady_shock_polar(GAS2, 2.0, 1.0, n_samples=100_000)
    f = polar.v - polar.u * np.tan(th)
    idx = np.where((f[:-1] < 0) & (f[1:] >= 0) | (f[:-1] >= 0) & (f[1:] < 0))[0]
    crossings = []
    for i in idx:
        w = f[i] / (f[i] - f[i + 1])
        crossings.append(((1 - w) * polar.u[i] + w * polar.u[i + 1],
                          (1 - w) * polar.v[i] + w * polar.v[i + 1],
                          (1 - w) * polar.rho[i] + w * polar.rho[i + 1]))
    assert len(crossings) == 2
    weak_oracle = max(crossings, key=lambda c: c[0])
    st = pm_states(GAS2, 2.0, 1.0, th)
    assert st.weak.u == pytest.approx(weak_oracle[0], abs=1e-8)
    assert st.weak.v == pytest.approx(weak_oracle[1], abs=1e-8)
    assert st.weak.rho == pytest.approx(weak_oracle[2], abs=1e-7)


def test_wedge_geometry_validation():
    WedgeGeometry(0.5, "reflection")
    WedgeGeometry(2.0, "diffraction")
    with pytest.raises(ValueError):
        WedgeGeometry(2.0, "reflection")
    with pytest.raises(ValueError):
        WedgeGeometry(0.5, "nonsense")


def test_downstream_density_vectorized_matches_scalar():
    n = np.array([0.5, 1.2, 2.0, 3.5])
    vec = downstream_density(GAS2, 1.0, n)
    assert np.isnan(vec[0])  # subsonic normal component
    for i in (1, 2, 3):
        assert vec[i] == pytest.approx(downstream_density(GAS2, 1.0, float(n[i])), rel=1e-13)
