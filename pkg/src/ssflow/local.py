"""Local algebraic theory at reflection points and wedge tips.

One oblique-jump engine drives everything: across a straight shock the
tangential pseudo-velocity is continuous, the mass flux jumps consistently,
and the Bernoulli head is shared.  The reflection-point system, the steady
shock polar, and the ramp (Prandtl-Meyer) states are all instances of
"deflect a supersonic pseudo-stream onto a prescribed direction".

Shocks are parametrized by the compression ratio z = rho_down/rho_up, for
which the upstream normal speed is closed-form,

    N(z)^2 = 2 (h(z rho) - h(rho)) z^2 / (z^2 - 1),

so no nested root solve is needed when scanning shock families.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DetachedError, SearchError
from .gas import BernoulliData, UniformState
from .jump import StraightShock, incident_shock
from .numerics import bisect, bisect_vec, expand_bracket, golden_min

TANGENT_ALPHA = 1e-7           # roots closer than this in shock angle merge
LOW_CONFIDENCE_ALPHA = 3e-4    # root separation corresponding to ~1e-6 rad from detachment


@dataclass(frozen=True)
class WedgeGeometry:
    """Wedge angle plus which configuration it belongs to."""

    theta_w: float
    kind: str = "reflection"   # reflection | diffraction | ramp

    def __post_init__(self):
        if self.kind not in ("reflection", "diffraction", "ramp"):
            raise ValueError(f"unknown wedge kind {self.kind!r}")
        hi = np.pi if self.kind == "diffraction" else np.pi / 2
        if not 0.0 < self.theta_w < hi:
            raise ValueError(f"theta_w out of range for kind={self.kind}: {self.theta_w}")


# ---------------------------------------------------------------------------
# Oblique jump core
# ---------------------------------------------------------------------------

def normal_speed_for_ratio(gas, rho_up, z):
    """Upstream normal speed sustaining compression ratio z (vectorized).

    Written with expm1/log1p so the z -> 1 limit (N -> c_up) is reached
    without cancellation.
    """
    z = np.asarray(z, float)
    zm1 = z - 1.0
    if gas.isothermal:
        dh = np.log1p(zm1)
    else:
        g = gas.gamma
        dh = rho_up ** (g - 1.0) * np.expm1((g - 1.0) * np.log1p(zm1)) / (g - 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        # z == 1 rows are zero-strength placeholders; callers mask them
        return np.sqrt(2.0 * dh * z * z / (zm1 * (z + 1.0)))


def _normal_speed_log(gas, rho_up, w):
    """Upstream normal speed at log-ratio w, pure-float path."""
    g = gas.gamma
    z = math.exp(w)
    zm1 = math.expm1(w)
    dh = w if g == 1.0 else rho_up ** (g - 1.0) * math.expm1((g - 1.0) * w) / (g - 1.0)
    return math.sqrt(2.0 * dh * z * z / (zm1 * (z + 1.0)))


def _downstream_density_scalar(gas, rho_up, n_up):
    if not n_up > 0:
        return float("nan")
    c2u = float(gas.sound_speed_sq(rho_up))
    if n_up * n_up <= c2u * (1.0 + 1e-15):
        return float("nan")

    def f(w):
        return _normal_speed_log(gas, rho_up, w) - n_up

    lo = 1e-14
    if f(lo) >= 0:
        return rho_up * (1.0 + lo)
    hi = 1.0
    for _ in range(90):
        if f(hi) > 0:
            break
        hi *= 2.0
    else:
        raise SearchError("downstream density bracket failed", (lo, hi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-16 * mid:
            break
    return rho_up * math.exp(0.5 * (lo + hi))


def downstream_density(gas, rho_up, n_up):
    """Density behind a shock with upstream normal speed n_up (vectorized).

    Inverts the closed-form N(z) by bisection on the monotone ratio; nan
    where the normal component is not strictly supersonic.
    """
    n = np.asarray(n_up, float)
    scalar = n.ndim == 0
    if scalar:
        return _downstream_density_scalar(gas, float(rho_up), float(n))
    n = np.atleast_1d(n).astype(float)
    out = np.full(n.shape, np.nan)
    c2u = float(gas.sound_speed_sq(rho_up))
    valid = (n > 0) & (n * n > c2u * (1.0 + 1e-15))
    if np.any(valid):
        N = n[valid]

        def f(z):
            return normal_speed_for_ratio(gas, rho_up, z) - N

        # N(z) is increasing from c_up at z -> 1+, so expand dyadically.
        d = np.full(N.shape, 1e-9)
        for _ in range(120):
            low = f(1.0 + d) < 0
            if not np.any(low):
                break
            d = np.where(low, 2.0 * d, d)
        fresh = d <= 1e-9
        z = bisect_vec(f, np.where(fresh, 1.0 + 1e-13, 1.0 + d / 2), 1.0 + d, rtol=1e-15)
        out[valid] = rho_up * np.where(fresh, 1.0 + (d / 2) * (N / N), z)
    return float(out[0]) if scalar else out


def max_log_compression(gas, q_up, rho_up):
    """log of the head-on (normal) shock ratio for stream speed |q_up|; 0 if subsonic.

    Steep configurations push the head-on ratio to astronomic values, so all
    shock-family scans run in w = log(z).
    """
    qn = float(np.hypot(q_up[0], q_up[1]))
    if qn <= float(gas.sound_speed(rho_up)):
        return 0.0

    def f(w):
        with np.errstate(over="ignore"):
            return float(normal_speed_for_ratio(gas, rho_up, np.exp(w))) - qn

    lo = 1e-11
    if f(lo) >= 0:      # barely supersonic: only infinitesimal shocks
        return lo
    hi = 1.0
    for _ in range(90):
        if f(hi) > 0:
            break
        hi *= 2.0
    else:
        raise SearchError("head-on ratio search failed", (lo, hi))
    return bisect(f, lo, hi, rtol=1e-14)


def max_compression_ratio(gas, q_up, rho_up):
    """Ratio of the head-on (normal) shock for stream speed |q_up|; 1 if subsonic."""
    return float(np.exp(max_log_compression(gas, q_up, rho_up)))


def _deflection_geometry(gas, q_up, rho_up, z, side):
    """Shock data at compression ratio z on one side of the stream.

    Returns (alpha, nu, q_down) with nu = (cos alpha, sin alpha) the unit
    normal; side = +-1 picks which way the normal tilts off the stream
    direction.  Vectorized over z.
    """
    q_up = np.asarray(q_up, float)
    z = np.asarray(z, float)
    qn = np.hypot(q_up[0], q_up[1])
    aq = np.arctan2(q_up[1], q_up[0])
    N = normal_speed_for_ratio(gas, rho_up, z)
    ratio = np.clip(N / qn, -1.0, 1.0)
    alpha = aq + side * np.arccos(ratio)
    nu = np.stack([np.cos(alpha), np.sin(alpha)], axis=-1)
    dn = (N - N / z)
    q_d = q_up[None, :] - dn[..., None] * nu if z.ndim else q_up - dn * nu
    return alpha, nu, q_d


@dataclass(frozen=True)
class ObliqueRoot:
    """One solution of the deflection problem: q_down parallel to a target line."""

    alpha: float
    nu: tuple
    q_down: tuple
    rho_down: float
    n_up: float
    n_down: float
    ratio: float
    tangent: bool = False

    @property
    def speed_down(self):
        return float(np.hypot(*self.q_down))


def _side_residual(gas, q_up, rho_up, n_hat, side):
    """Residual q_down . n_hat as a function of w = log(ratio), plus its range."""
    wmax = max_log_compression(gas, q_up, rho_up)
    n_hat = np.asarray(n_hat, float)

    def f(w):
        _, _, q_d = _deflection_geometry(gas, q_up, rho_up, np.exp(w), side)
        return q_d @ n_hat

    return f, wmax


def _alpha_residual(gas, q_up, rho_up, n_hat):
    """Deflection residual as a function of the shock-normal angle.

    Well conditioned over the whole admissible cone, including the head-on
    direction where the ratio chart loses precision.
    """
    q_up = np.asarray(q_up, float)
    n_hat = np.asarray(n_hat, float)

    def f(a):
        nu = np.array([np.cos(a), np.sin(a)])
        n_up = float(q_up @ nu)
        rho_d = downstream_density(gas, rho_up, n_up)
        if np.isnan(rho_d):
            return float(q_up @ n_hat)   # zero-strength limit
        q_d = q_up - (n_up - rho_up * n_up / rho_d) * nu
        return float(q_d @ n_hat)

    return f


def _oblique_root_at(gas, q_up, rho_up, alpha):
    q_up = np.asarray(q_up, float)
    nu = np.array([np.cos(alpha), np.sin(alpha)])
    n_up = float(q_up @ nu)
    rho_d = float(downstream_density(gas, rho_up, n_up))
    n_dn = rho_up * n_up / rho_d
    q_d = q_up - (n_up - n_dn) * nu
    return ObliqueRoot(alpha=float(alpha), nu=(float(nu[0]), float(nu[1])),
                       q_down=(float(q_d[0]), float(q_d[1])), rho_down=rho_d,
                       n_up=n_up, n_down=n_dn, ratio=rho_d / float(rho_up))


def _roots_one_side(gas, q_up, rho_up, n_hat, side, n_scan):
    """Weak/strong roots on one side of the stream.

    The residual is scanned in the (cheap, closed-form) log-ratio chart to
    place the extremum, then both roots are bisected in angle space, where
    the brackets end at the perfectly conditioned cone edge and head-on
    direction.
    """
    fw, wmax = _side_residual(gas, q_up, rho_up, n_hat, side)
    if wmax <= 1e-11:
        return []
    q_up = np.asarray(q_up, float)
    qn = float(np.hypot(q_up[0], q_up[1]))
    aq = float(np.arctan2(q_up[1], q_up[0]))
    f_end = float(q_up @ np.asarray(n_hat, float))
    sgn = -1.0 if f_end >= 0 else 1.0

    grid = np.linspace(1e-11 * wmax, wmax, n_scan)
    vals = fw(grid)
    i = 1 + int(np.argmax(sgn * vals[1:-1]))
    wm, _ = golden_min(lambda w: -sgn * float(fw(w)), grid[max(i - 1, 0)],
                       grid[min(i + 1, n_scan - 1)], xtol=1e-9 * max(wmax, 1.0))

    def alpha_of(w):
        n_up = float(normal_speed_for_ratio(gas, rho_up, np.exp(w)))
        return aq + side * float(np.arccos(min(1.0, n_up / qn)))

    fa = _alpha_residual(gas, q_up, rho_up, n_hat)
    a_edge = alpha_of(grid[0])      # essentially sonic normal component
    a_mid = alpha_of(wm)            # residual extremum
    if sgn * fa(a_mid) <= 0:        # extremum never crosses zero on this side
        return []
    out = []
    for a, b in ((a_edge, a_mid), (a_mid, aq)):
        try:
            alpha = bisect(fa, a, b, rtol=0.0, atol=1e-15)
        except SearchError:
            continue
        out.append(_oblique_root_at(gas, q_up, rho_up, alpha))
    return out


def deflection_roots(gas, q_up, rho_up, n_hat, n_scan=1024):
    """All shocks deflecting q_up onto the line with normal n_hat.

    Scans the compression-ratio family on both sides of the stream, refines
    the residual extremum, and bisects the sign changes.  Returns ObliqueRoot
    records sorted by downstream density (weak first); empty when detached.
    A pair closer than TANGENT_ALPHA in shock angle merges into one
    tangent-flagged root.
    """
    q_up = np.asarray(q_up, float)
    roots = []
    for side in (+1.0, -1.0):
        roots.extend(_roots_one_side(gas, q_up, rho_up, n_hat, side, n_scan))
    roots.sort(key=lambda r: r.rho_down)
    if len(roots) == 2 and abs(roots[1].alpha - roots[0].alpha) < TANGENT_ALPHA:
        r = roots[0]
        roots = [ObliqueRoot(alpha=0.5 * (roots[0].alpha + roots[1].alpha), nu=r.nu,
                             q_down=r.q_down, rho_down=r.rho_down, n_up=r.n_up,
                             n_down=r.n_down, ratio=r.ratio, tangent=True)]
    return roots


def max_deflection_residual(gas, q_up, rho_up, n_hat, n_scan=1024):
    """Extremal value of q_down . n_hat toward the crossing side (both sides).

    Positive iff deflection roots exist; its zero in an outer parameter marks
    the detachment transition.
    """
    q_up = np.asarray(q_up, float)
    f_end = float(q_up @ np.asarray(n_hat, float))
    sgn = -1.0 if f_end >= 0 else 1.0
    best = sgn * f_end
    for side in (+1.0, -1.0):
        f, wmax = _side_residual(gas, q_up, rho_up, n_hat, side)
        if wmax <= 1e-11:
            continue
        grid = np.linspace(1e-11 * wmax, wmax, n_scan)
        vals = sgn * f(grid)
        i = int(np.argmax(vals))
        _, fm = golden_min(lambda w: -sgn * float(f(w)), grid[max(i - 1, 0)],
                           grid[min(i + 1, n_scan - 1)], xtol=1e-14 * max(wmax, 1.0))
        best = max(best, -fm)
    return best


# ---------------------------------------------------------------------------
# Regular reflection local states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReflectionLocalData:
    """States around the reflection point plus the classification there."""

    gas: object
    bern: BernoulliData
    state0: UniformState
    state1: UniformState
    p0: tuple
    theta_w: float
    weak: UniformState | None
    strong: UniformState | None
    classification: str       # supersonic | sonic | subsonic | detached
    mach_weak: float | None = None
    weak_shock: StraightShock | None = None
    strong_shock: StraightShock | None = None
    tangent: bool = False
    low_confidence: bool = False


def incident_states(gas, rho0, rho1):
    """States (0), (1) and the shared Bernoulli data of the head-on problem."""
    bern = BernoulliData.from_rest_state(gas, rho0)
    inc = incident_shock(gas, rho0, rho1)
    state0 = UniformState(u=0.0, v=0.0, k=0.0, rho=float(rho0))
    if inc.degenerate:
        state1 = UniformState(u=0.0, v=0.0, k=0.0, rho=float(rho1))
    else:
        state1 = UniformState(u=inc.u1, v=0.0, k=-inc.u1 * inc.xi0, rho=float(rho1))
    return bern, inc, state0, state1


def _reflection_setup(gas, rho0, rho1, theta_w):
    bern, inc, state0, state1 = incident_states(gas, rho0, rho1)
    p0 = np.array([inc.xi0, inc.xi0 * np.tan(theta_w)])
    q_up = np.array([inc.u1 - p0[0], -p0[1]])
    n_w = np.array([-np.sin(theta_w), np.cos(theta_w)])
    return bern, inc, state0, state1, p0, q_up, n_w


def state2_regular_reflection(gas, rho0, rho1, theta_w, tol_sonic=1e-9):
    """Weak/strong state (2) of the regular reflection at wedge angle theta_w.

    The reflection-point system is the oblique deflection of the state-(1)
    pseudo-stream at P0 onto the wedge direction; the Bernoulli closure for
    rho2 is then automatic.  No real root means a detached classification,
    not an exception.
    """
    if not 0 < rho0 < rho1:
        raise ValueError("need 0 < rho0 < rho1")
    if not 0 < theta_w < np.pi / 2:
        raise ValueError("theta_w must lie in (0, pi/2)")
    tw = float(theta_w)
    bern, inc, state0, state1, p0, q_up, n_w = _reflection_setup(gas, rho0, rho1, tw)
    roots = deflection_roots(gas, q_up, rho1, n_w)

    def to_state(r):
        uv = np.array(r.q_down) + p0
        k2 = state1.value(*p0) + 0.5 * (p0 @ p0) - uv @ p0
        return UniformState(u=float(uv[0]), v=float(uv[1]), k=float(k2), rho=r.rho_down)

    common = dict(gas=gas, bern=bern, state0=state0, state1=state1,
                  p0=(float(p0[0]), float(p0[1])), theta_w=tw)
    if not roots:
        return ReflectionLocalData(weak=None, strong=None, classification="detached", **common)

    weak_root = roots[0]
    weak = to_state(weak_root)
    strong = to_state(roots[-1]) if len(roots) > 1 else None
    mach = weak_root.speed_down / float(gas.sound_speed(weak_root.rho_down))
    if abs(mach - 1.0) <= tol_sonic:
        cls = "sonic"
    elif mach > 1.0:
        cls = "supersonic"
    else:
        cls = "subsonic"
    sep = abs(roots[-1].alpha - roots[0].alpha) if len(roots) > 1 else 0.0
    return ReflectionLocalData(
        weak=weak, strong=strong, classification=cls, mach_weak=float(mach),
        weak_shock=StraightShock(point=(float(p0[0]), float(p0[1])), normal=weak_root.nu),
        strong_shock=StraightShock(point=(float(p0[0]), float(p0[1])), normal=roots[-1].nu)
        if strong is not None else None,
        tangent=weak_root.tangent,
        low_confidence=(weak_root.tangent or sep < LOW_CONFIDENCE_ALPHA),
        **common,
    )


def reflection_weak_grid(gas, rho0, rho1, thetas, n_scan=512):
    """Vectorized weak/strong sweep over a wedge-angle grid.

    Returns dict of arrays (mach_weak, rho_weak, rho_strong, u_weak, v_weak,
    exists) suitable for dense transition scans; accuracy per point is that
    of a ~55-step bisection, ample for sign counting.
    """
    thetas = np.asarray(thetas, float)
    bern, inc, state0, state1 = incident_states(gas, rho0, rho1)
    xi0, u1 = inc.xi0, inc.u1
    p0 = np.stack([np.full_like(thetas, xi0), xi0 * np.tan(thetas)], axis=-1)
    q_up = np.stack([u1 - p0[..., 0], -p0[..., 1]], axis=-1)
    n_w = np.stack([-np.sin(thetas), np.cos(thetas)], axis=-1)
    qn = np.hypot(q_up[..., 0], q_up[..., 1])
    aq = np.arctan2(q_up[..., 1], q_up[..., 0])
    cu = float(gas.sound_speed(rho1))
    sup = qn > cu * (1 + 1e-14)

    # head-on log-ratio per row, by vector bisection on the closed-form N
    def fw(w):
        with np.errstate(over="ignore"):
            return normal_speed_for_ratio(gas, rho1, np.exp(w)) - qn

    whi = np.full(thetas.shape, 1.0)
    with np.errstate(over="ignore"):
        for _ in range(90):
            low = (normal_speed_for_ratio(gas, rho1, np.exp(whi)) < qn) & sup
            if not np.any(low):
                break
            whi = np.where(low, whi * 2, whi)
    wmax = bisect_vec(fw, np.full(thetas.shape, 1e-12), whi, rtol=1e-14)
    wmax = np.where(sup, wmax, 1.0)   # subsonic rows get dummy values, masked below

    n = thetas.size
    out = dict(mach_weak=np.full(n, np.nan), rho_weak=np.full(n, np.nan),
               rho_strong=np.full(n, np.nan), u_weak=np.full(n, np.nan),
               v_weak=np.full(n, np.nan), exists=np.zeros(n, bool))

    t = np.linspace(1e-11, 1.0, n_scan)
    f_end = q_up[:, 0] * n_w[:, 0] + q_up[:, 1] * n_w[:, 1]
    sgn = np.where(f_end >= 0, -1.0, 1.0)

    def alpha_eval(al, rows):
        """Residual and downstream data at shock-normal angles al (per row)."""
        nux, nuy = np.cos(al), np.sin(al)
        N = q_up[rows, 0] * nux + q_up[rows, 1] * nuy
        rho_d = downstream_density(gas, rho1, np.maximum(N, 0.0))
        weakly = ~np.isfinite(rho_d)
        rho_d = np.where(weakly, rho1, rho_d)
        dn = np.where(weakly, 0.0, N - rho1 * N / rho_d)
        qx = q_up[rows, 0] - dn * nux
        qy = q_up[rows, 1] - dn * nuy
        return qx * n_w[rows, 0] + qy * n_w[rows, 1], qx, qy, rho_d

    for side in (+1.0, -1.0):
        # place the residual extremum with the closed-form ratio chart
        w = wmax[:, None] * t[None, :]
        z = np.exp(w)
        N = normal_speed_for_ratio(gas, rho1, z)
        N = np.where(np.isfinite(N), N, 0.0)
        rat = np.clip(N / qn[:, None], -1.0, 1.0)
        alpha = aq[:, None] + side * np.arccos(rat)
        dn = N - N / z
        f = ((q_up[:, None, 0] - dn * np.cos(alpha)) * n_w[:, None, 0]
             + (q_up[:, None, 1] - dn * np.sin(alpha)) * n_w[:, None, 1])
        f = np.where(sup[:, None], f, 1.0)
        imax = 1 + np.argmax((sgn[:, None] * f)[:, 1:-1], axis=1)
        rows_all = np.arange(n)
        a_mid = alpha[rows_all, imax]
        a_edge = alpha[rows_all, 0]
        fm = alpha_eval(a_mid, rows_all)[0]
        rows = np.where(sup & (sgn * fm > 0))[0]
        if rows.size == 0:
            continue
        # both roots in angle space: brackets end at the cone edge and at the
        # head-on direction, which stay well conditioned
        for which, (alo, ahi) in (("weak", (a_edge[rows], a_mid[rows])),
                                  ("strong", (a_mid[rows], aq[rows]))):
            ar = bisect_vec(lambda a: alpha_eval(a, rows)[0], alo, ahi, rtol=1e-15)
            _, qx, qy, rho_d = alpha_eval(ar, rows)
            if which == "weak":
                better = ~out["exists"][rows] | (rho_d < out["rho_weak"][rows])
                rw = rows[better]
                out["rho_weak"][rw] = rho_d[better]
                out["mach_weak"][rw] = (np.hypot(qx, qy)[better]
                                        / gas.sound_speed(rho_d[better]))
                out["u_weak"][rw] = (qx + p0[rows, 0])[better]
                out["v_weak"][rw] = (qy + p0[rows, 1])[better]
                out["exists"][rw] = True
            else:
                cur = out["rho_strong"][rows]
                out["rho_strong"][rows] = np.where(np.isnan(cur), rho_d,
                                                   np.maximum(cur, rho_d))
    return out


def _reflection_gap(gas, rho0, rho1, theta_w):
    """Max deflection residual at P0; positive iff state (2) exists."""
    _, _, _, _, _, q_up, n_w = _reflection_setup(gas, rho0, rho1, theta_w)
    return max_deflection_residual(gas, q_up, rho1, n_w)


def detachment_angle(gas, rho0, rho1, tol=1e-10):
    """Smallest wedge angle admitting a state (2), by bisection on the
    root-existence transition."""
    def f(t):
        return _reflection_gap(gas, rho0, rho1, t)

    hi = np.pi / 2 - 1e-8
    if f(hi) <= 0:
        raise SearchError("no state (2) even near pi/2", (0.0, np.pi / 2))
    grid = np.linspace(0.02, hi, 160)
    lo = None
    for t in grid:
        if f(t) < 0:
            lo = t
        else:
            break
    if lo is None:
        raise SearchError("state (2) exists on the whole scanned range", (0.02, hi))
    return bisect(f, lo, hi, rtol=0.0, atol=tol)


def weak_mach_at_p0(gas, rho0, rho1, theta_w):
    """|Dphi_2^weak(P0)| / c2, or nan when detached."""
    data = state2_regular_reflection(gas, rho0, rho1, theta_w)
    return data.mach_weak if data.mach_weak is not None else float("nan")


def sonic_angle(gas, rho0, rho1, tol=1e-10, theta_d=None):
    """Wedge angle at which the weak state (2) is exactly sonic at P0."""
    if theta_d is None:
        theta_d = detachment_angle(gas, rho0, rho1, tol=tol)

    def f(t):
        return weak_mach_at_p0(gas, rho0, rho1, t) - 1.0

    lo = theta_d + 1e-9
    hi = np.pi / 2 - 1e-9
    flo, fhi = f(lo), f(hi)
    if not np.isfinite(flo) or flo * fhi > 0:
        raise SearchError("sonic transition not bracketed", (lo, hi))
    return bisect(f, lo, hi, rtol=0.0, atol=tol)


@dataclass(frozen=True)
class CriticalAngles:
    sonic: float
    detachment: float
    diffraction_critical: float | None = None


def critical_angles(gas, rho0, rho1, include_diffraction=False, tol=1e-10):
    td = detachment_angle(gas, rho0, rho1, tol=tol)
    ts = sonic_angle(gas, rho0, rho1, tol=tol, theta_d=td)
    tc = diffraction_critical_angle(gas, rho0, rho1, tol=tol) if include_diffraction else None
    return CriticalAngles(sonic=ts, detachment=td, diffraction_critical=tc)


def diffraction_critical_angle(gas, rho0, rho1, tol=1e-10):
    """Convex-wedge angle at which the rest-state and state-(1) sonic circles
    meet on the wedge ray (direction angle theta_w - pi).

    The gap function is the first positive crossing of the state-(1) circle
    along the ray minus the rest-state sonic radius; its sign change is
    bisected.
    """
    if not 0 < rho0 < rho1:
        raise ValueError("need 0 < rho0 < rho1")
    inc = incident_shock(gas, rho0, rho1)
    u1 = inc.u1
    c0 = float(gas.sound_speed(rho0))
    c1 = float(gas.sound_speed(rho1))

    def gap(t):
        b = u1 * np.cos(t)
        disc = b * b - (u1 * u1 - c1 * c1)
        if disc < 0:
            return np.nan
        r = np.sqrt(disc)
        ts = [x for x in (-b - r, -b + r) if x > 0]
        if not ts:
            return np.nan
        return min(ts) - c0

    grid = np.linspace(1e-3, np.pi - 1e-3, 2048)
    vals = [gap(t) for t in grid]
    bracket = None
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b < 0:
            bracket = (grid[i], grid[i + 1])
            break
    if bracket is None:
        raise SearchError("sonic-circle tangency not found", (grid[0], grid[-1]))
    return bisect(gap, bracket[0], bracket[1], rtol=0.0, atol=tol)


# ---------------------------------------------------------------------------
# Normal reflection (theta_w -> pi/2 anchor)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalReflection:
    rho2: float
    xi_bar: float
    state2: UniformState
    state0: UniformState
    state1: UniformState
    bern: BernoulliData
    u1: float
    xi0: float


def wall_normal_reflection(gas, rho_up, w):
    """1-D reflection of a stream with speed w off a resting wall.

    Returns (rho_down, standoff): the reflected shock sits at distance
    `standoff` from the wall and the fluid between is at rest.  The residual
    is monotone in rho_down, so the bracket always closes.
    """
    if w == 0.0:
        return float(rho_up), float(gas.sound_speed(rho_up))
    h_up = float(gas.enthalpy(rho_up))

    def f(rd):
        s = rho_up * w / (rd - rho_up)
        return float(gas.enthalpy(rd)) - h_up - 0.5 * w * w - w * s

    lo = rho_up * (1.0 + 1e-12)
    lo, hi = expand_bracket(f, lo, rho_up * 2.0, hi_max=rho_up * 1e12)
    rd = bisect(f, lo, hi, rtol=1e-15)
    return float(rd), float(rho_up * w / (rd - rho_up))


def solve_normal_reflection(gas, rho0, rho1):
    """Head-on reflection: vertical reflected shock, state (2) at rest."""
    if not 0 < rho0 <= rho1:
        raise ValueError("need 0 < rho0 <= rho1")
    bern, inc, state0, state1 = incident_states(gas, rho0, rho1)
    if inc.degenerate:
        c0 = float(gas.sound_speed(rho0))
        st2 = UniformState(u=0.0, v=0.0, k=0.0, rho=float(rho0))
        return NormalReflection(rho2=float(rho0), xi_bar=-c0, state2=st2,
                                state0=state0, state1=state1, bern=bern,
                                u1=0.0, xi0=float("nan"))
    rho2, standoff = wall_normal_reflection(gas, rho1, inc.u1)
    xi_bar = -standoff
    k2 = inc.u1 * (xi_bar - inc.xi0)
    st2 = UniformState(u=0.0, v=0.0, k=float(k2), rho=float(rho2))
    assert rho2 > rho1 > rho0
    return NormalReflection(rho2=float(rho2), xi_bar=float(xi_bar), state2=st2,
                            state0=state0, state1=state1, bern=bern,
                            u1=inc.u1, xi0=inc.xi0)


# ---------------------------------------------------------------------------
# Steady shock polar and ramp states
# ---------------------------------------------------------------------------

@dataclass
class PolarCurve:
    """Downstream states reachable from (u_inf, 0) through one oblique shock."""

    u_inf: float
    rho_inf: float
    c_inf: float
    mach: float
    beta: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)

    @property
    def u_normal(self):
        """Normal-shock endpoint on the u-axis."""
        return float(self.u[-1])


def steady_shock_polar(gas, u_inf, rho_inf, n_samples=512):
    """Sample the upper-branch shock polar over beta in [mach angle, pi/2]."""
    c_inf = float(gas.sound_speed(rho_inf))
    if u_inf <= c_inf:
        raise ValueError(f"supersonic inflow required: u_inf={u_inf} <= c_inf={c_inf}")
    mach = u_inf / c_inf
    mu = float(np.arcsin(1.0 / mach))
    beta = np.linspace(mu, np.pi / 2, n_samples)
    n_up = u_inf * np.sin(beta)
    rho_d = downstream_density(gas, rho_inf, n_up)
    rho_d = np.where(np.isnan(rho_d), rho_inf, rho_d)   # vanishing strength at the Mach angle
    dn = n_up - rho_inf * n_up / rho_d
    u = u_inf - dn * np.sin(beta)
    v = dn * np.cos(beta)
    return PolarCurve(u_inf=float(u_inf), rho_inf=float(rho_inf), c_inf=c_inf,
                      mach=float(mach), beta=beta, u=u, v=v, rho=rho_d)


@dataclass(frozen=True)
class PMStates:
    """Ramp local states: polar intersections plus the far-field normal-shock state.

    weak/strong are in the incoming-flow frame (k = 0: both attached shocks
    pass through the tip).  state1 is in the wall-aligned frame, where its
    velocity is horizontal and the normal shock is the line {eta = eta1}.
    """

    gas: object
    bern: BernoulliData
    u_inf: float
    rho_inf: float
    theta_w: float
    weak: UniformState
    strong: UniformState | None
    state1: UniformState
    eta1: float
    tangent: bool = False


def pm_states(gas, u_inf, rho_inf, theta_w):
    """Weak/strong ramp states and the normal-shock state (1)."""
    c_inf = float(gas.sound_speed(rho_inf))
    if u_inf <= c_inf:
        raise ValueError("supersonic inflow required")
    if not 0 < theta_w < np.pi / 2:
        raise ValueError("theta_w must lie in (0, pi/2)")
    bern = BernoulliData.from_constant(gas, float(gas.enthalpy(rho_inf)) + 0.5 * u_inf ** 2)
    n_hat = np.array([-np.sin(theta_w), np.cos(theta_w)])
    roots = deflection_roots(gas, np.array([u_inf, 0.0]), rho_inf, n_hat)
    if not roots:
        raise DetachedError(f"theta_w={theta_w} is beyond the ramp detachment angle")

    def to_state(r):
        return UniformState(u=float(r.q_down[0]), v=float(r.q_down[1]), k=0.0, rho=r.rho_down)

    weak = to_state(roots[0])
    strong = to_state(roots[-1]) if len(roots) > 1 else None
    rho1, eta1 = wall_normal_reflection(gas, rho_inf, u_inf * np.sin(theta_w))
    u1 = u_inf * np.cos(theta_w)
    k1 = -u_inf * np.sin(theta_w) * eta1
    state1 = UniformState(u=float(u1), v=0.0, k=float(k1), rho=float(rho1))
    return PMStates(gas=gas, bern=bern, u_inf=float(u_inf), rho_inf=float(rho_inf),
                    theta_w=float(theta_w), weak=weak, strong=strong,
                    state1=state1, eta1=float(eta1), tangent=roots[0].tangent)


def pm_angles(gas, u_inf, rho_inf, criterion="state", tol=1e-10):
    """(sonic angle, detachment angle) for the ramp problem.

    The detachment angle is the maximal flow deflection over the polar; the
    sonic angle is where the weak intersection crosses its own sound speed
    (criterion="state", the default) or the freestream sound speed
    (criterion="freestream", the circle drawn in polar diagrams).
    """
    c_inf = float(gas.sound_speed(rho_inf))
    if u_inf <= c_inf:
        raise ValueError("supersonic inflow required")
    q_up = np.array([u_inf, 0.0])
    wmax = max_log_compression(gas, q_up, rho_inf)

    def neg_deflection(w):
        # side -1 tilts the normal below the stream, deflecting the flow up
        _, _, q_d = _deflection_geometry(gas, q_up, rho_inf, float(np.exp(w)), -1.0)
        return -float(np.arctan2(q_d[1], q_d[0]))

    grid = np.linspace(1e-11 * wmax, wmax, 512)
    i = int(np.argmin([neg_deflection(w) for w in grid]))
    _, fd = golden_min(neg_deflection, grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)],
                       xtol=1e-14 * max(wmax, 1.0))
    theta_d = -fd

    def polar_point(w):
        _, _, q_d = _deflection_geometry(gas, q_up, rho_inf, float(np.exp(w)), -1.0)
        return q_d

    def sonic_gap(w):
        q_d = polar_point(w)
        rho_d = rho_inf * float(np.exp(w))
        cref = c_inf if criterion == "freestream" else float(gas.sound_speed(rho_d))
        return float(np.hypot(q_d[0], q_d[1])) - cref

    # the downstream speed runs from u_inf (sonic shock-strength end) to the
    # normal-shock point, crossing the reference circle once
    lo, hi = 1e-11 * wmax, wmax
    glo, ghi = sonic_gap(lo), sonic_gap(hi)
    if not (np.isfinite(glo) and np.isfinite(ghi)) or glo * ghi > 0:
        raise SearchError("sonic crossing not found on the polar", (lo, hi))
    ws = bisect(sonic_gap, lo, hi, rtol=1e-15)
    q_s = polar_point(ws)
    theta_s = float(np.arctan2(q_s[1], q_s[0]))
    if not theta_s < theta_d:
        raise SearchError("sonic point past the detachment tangency", (theta_s, theta_d))
    return float(theta_s), float(theta_d)
