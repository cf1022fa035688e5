"""Free-boundary solver for the transonic region behind reflected shocks.

The field unknown is the deviation d = phi - phi_base from a uniform anchor
state.  Uniform states have constant Hessian -I, so the quasilinear interior
equation collapses to

    a11 d_xx + 2 a12 d_xy + a22 d_yy = 0,

with velocity-dependent coefficients; a configuration whose exact solution is
a single uniform state is then reproduced to solver tolerance on any grid.
The free boundary is a polar graph about the sonic center of the upstream
uniform state; each outer cycle solves the interior with the shock held
fixed (oblique mass-flux condition on the shock edge), then moves the shock
vertices toward the upstream potential-match level set, under-relaxed.
"""

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    NearSonicError,
    NonConvergenceError,
    RayUpdateError,
    UnsupportedConfigurationError,
    VacuumError,
)
from .fbgrid import QuadGrid, circle_arc, line_segment, polyline_edge
from .gas import UniformState
from .local import (
    pm_angles,
    pm_states,
    solve_normal_reflection,
    sonic_angle,
    state2_regular_reflection,
)


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the free-boundary iteration."""

    nx: int = 65
    ny: int = 65
    delta_cutoff: float = 0.1     # ellipticity cutoff strength
    cutoff_reach: float = 0.1     # cutoff ramp length, as a fraction of diam
    relax: float = 0.5            # shock under-relaxation, halved on rejection
    tol_pde: float = 1e-8
    tol_shock: float = 1e-8
    max_outer: int = 200
    max_inner: int = 60
    near_sonic_guard: float = 1e-6

    def __post_init__(self):
        if min(self.nx, self.ny) < 8:
            raise ValueError("grid too coarse")
        if not 0 < self.relax <= 1:
            raise ValueError("relax must lie in (0, 1]")


@dataclass
class ShockPolyline:
    """Discrete free boundary as a polar graph about a fixed center."""

    center: np.ndarray
    psi: np.ndarray
    r: np.ndarray
    movable: np.ndarray     # per-vertex: updated along its ray or pinned

    def points(self):
        return np.stack([self.center[0] + self.r * np.cos(self.psi),
                         self.center[1] + self.r * np.sin(self.psi)], axis=-1)

    def validate(self):
        if np.any(self.r <= 0):
            raise ValueError("shock polyline radius must stay positive")
        dpsi = np.diff(self.psi)
        if not (np.all(dpsi > 0) or np.all(dpsi < 0)):
            raise ValueError("shock polyline must be monotone in the polar angle")


@dataclass
class Diagnostics:
    """Residuals and admissibility measures of a converged solve."""

    pde_residual_inf: float
    rh_phi_residual_inf: float
    rh_flux_residual_inf: float
    ellipticity_min_margin: float
    bounds_violation: float
    monotonicity_violation: float
    sonic_gradient_mismatch: float
    cutoff_active_distance: float
    outer_iterations: int
    converged: bool

    def as_dict(self):
        return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else
                    int(v) if isinstance(v, (int, np.integer)) else float(v))
                for k, v in self.__dict__.items()}


@dataclass
class FreeBoundaryProblem:
    """Everything the elliptic/shock cycle needs to know about a configuration."""

    gas: object
    bern: object
    base: UniformState
    upstream: UniformState
    edge_kinds: dict            # edge -> ("dirichlet", state) | ("slip",) | ("shock",)
    shock_edge: str
    sonic_circles: list        # [(center xy, radius), ...]
    lower_states: list
    upper_state: UniformState
    monotone_dirs: list        # [(unit vector, sign), ...], sign * D(upper-phi).e >= 0
    label: str = ""
    meta: dict = field(default_factory=dict)

    def rebuild_edges(self, shock):
        raise NotImplementedError


@dataclass
class SelfSimilarField:
    """phi over the subsonic region, stored as a deviation from the base state."""

    grid: QuadGrid
    gas: object
    bern: object
    base: UniformState
    d: np.ndarray

    @property
    def phi(self):
        return self.base.value(self.grid.x, self.grid.y) + self.d

    def total_gradient(self):
        gx, gy = self.grid.gradient(self.d)
        bx, by = self.base.gradient(self.grid.x, self.grid.y)
        return bx + gx, by + gy

    def sound_speed_sq(self):
        gx, gy = self.total_gradient()
        g = self.gas
        c2 = self.bern.b0 - (g.gamma - 1.0) * (0.5 * (gx ** 2 + gy ** 2) + self.phi)
        if g.isothermal:
            c2 = np.ones_like(c2)
        return c2

    def density(self):
        c2 = self.sound_speed_sq()
        if self.gas.isothermal:
            gx, gy = self.total_gradient()
            return np.exp(self.bern.b - 0.5 * (gx ** 2 + gy ** 2) - self.phi)
        return c2 ** (1.0 / (self.gas.gamma - 1.0))

    def mach(self):
        gx, gy = self.total_gradient()
        return np.sqrt((gx ** 2 + gy ** 2) / self.sound_speed_sq())

    def vorticity(self):
        """Discrete curl of the pseudo-velocity; identically zero for d == 0.

        The base-state part is curl-free exactly, so only the deviation is
        differenced.
        """
        gx, gy = self.grid.gradient(self.d)
        return self.grid.gradient(gy)[0] - self.grid.gradient(gx)[1]


def _sonic_distance(problem, x, y):
    d = np.full(np.shape(x), np.inf)
    for (cx, cy), rad in problem.sonic_circles:
        d = np.minimum(d, np.abs(np.hypot(x - cx, y - cy) - rad))
    return d


def _domain_diameter(grid):
    xs = np.array([grid.x[0, 0], grid.x[-1, 0], grid.x[0, -1], grid.x[-1, -1]])
    ys = np.array([grid.y[0, 0], grid.y[-1, 0], grid.y[0, -1], grid.y[-1, -1]])
    return float(np.max(np.hypot(xs[:, None] - xs[None, :], ys[:, None] - ys[None, :])))


def _coefficients(problem, grid, d, cfg):
    """Picard coefficient fields with the degenerate-ellipticity cutoff."""
    base = problem.base
    gx, gy = grid.gradient(d)
    bx, by = base.gradient(grid.x, grid.y)
    gx, gy = bx + gx, by + gy
    phi = base.value(grid.x, grid.y) + d
    g = problem.gas
    if g.isothermal:
        c2 = np.ones_like(phi)
    else:
        c2 = problem.bern.b0 - (g.gamma - 1.0) * (0.5 * (gx ** 2 + gy ** 2) + phi)
    if np.any(c2 <= 0):
        raise VacuumError("vacuum inside the elliptic region")
    m2 = (gx ** 2 + gy ** 2) / c2
    dist = _sonic_distance(problem, grid.x, grid.y)
    d0 = cfg.cutoff_reach * _domain_diameter(grid)
    cap = 1.0 - cfg.delta_cutoff * np.minimum(dist, d0)
    m2c = np.minimum(m2, cap)
    fac = np.where(m2 > 0, m2c / np.maximum(m2, 1e-300), 1.0)
    a11 = 1.0 - fac * gx * gx / c2
    a12 = -fac * gx * gy / c2
    a22 = 1.0 - fac * gy * gy / c2
    active = m2 > cap
    return a11, a12, a22, dist, active


def _boundary_assignment(problem, grid):
    """Per-node boundary-condition ownership.

    Slip edges claim their nodes first, then the shock edge, then Dirichlet
    edges; a corner shared by two slip edges gets both conditions summed.
    """
    kind = np.zeros(grid.n_nodes, dtype=int)   # 0 int, 1 dirichlet, 2 shock, 3 slip
    owner = {}
    slip_hits = {}
    order = (["slip", "shock", "dirichlet"])
    for want in order:
        for edge, spec_ in problem.edge_kinds.items():
            if spec_[0] != want:
                continue
            idx = grid.edge_nodes(edge)
            for i in idx:
                if want == "slip":
                    slip_hits.setdefault(i, []).append(edge)
                kind[i] = {"dirichlet": 1, "shock": 2, "slip": 3}[want]
                owner[i] = edge
    double_slip = {i for i, es in slip_hits.items() if len(set(es)) > 1 and kind[i] == 3}
    return kind, owner, double_slip


def elliptic_solve(gas, bern, field_, shock, cfg, problem, source=None):
    """Solve the interior equation with the shock held fixed.

    Picard iteration on frozen coefficients; Dirichlet data on sonic edges,
    slip on walls, and the density-weighted mass-flux condition on the shock
    edge.  Returns the updated field and its interior residual.
    """
    grid = field_.grid
    base = problem.base
    n = grid.n_nodes
    kind, owner, double_slip = _boundary_assignment(problem, grid)
    interior = kind == 0

    x, y = grid.x.ravel(), grid.y.ravel()
    bgx, bgy = base.gradient(x, y)
    bval = base.value(x, y)

    # geometric data for the BC rows
    nvec_x = np.zeros(n)
    nvec_y = np.zeros(n)
    dir_rhs = np.zeros(n)
    for edge, spec_ in problem.edge_kinds.items():
        idx = grid.edge_nodes(edge)
        nx_, ny_ = grid.edge_normals(edge)
        if spec_[0] == "dirichlet":
            st = spec_[1]
            sel = kind[idx] == 1
            dir_rhs[idx[sel]] = (st.value(x[idx], y[idx]) - bval[idx])[sel]
        elif spec_[0] in ("slip", "shock"):
            want = 3 if spec_[0] == "slip" else 2
            sel = kind[idx] == want
            nvec_x[idx[sel]] = nx_[sel]
            nvec_y[idx[sel]] = ny_[sel]
    for i in double_slip:
        # sum of both wall conditions at a slip-slip corner
        nxs, nys = 0.0, 0.0
        for edge, spec_ in problem.edge_kinds.items():
            if spec_[0] != "slip":
                continue
            idx = grid.edge_nodes(edge)
            pos = np.where(idx == i)[0]
            if pos.size:
                ex, ey = grid.edge_normals(edge)
                nxs += ex[pos[0]]
                nys += ey[pos[0]]
        nvec_x[i], nvec_y[i] = nxs, nys

    upstream = problem.upstream
    upx, upy = upstream.gradient(x, y)
    up_flux = upstream.rho * (upx * nvec_x + upy * nvec_y)

    src = np.zeros(n)
    if source is not None:
        src = np.asarray(source(grid.x, grid.y)).ravel()

    d = field_.d.ravel().copy()
    rows_dir = sp.diags((kind == 1).astype(float))
    mask_int = sp.diags(interior.astype(float))
    residual = np.inf
    for _ in range(cfg.max_inner):
        a11, a12, a22, dist, active = _coefficients(problem, grid, d.reshape(grid.shape), cfg)
        A = grid.operator(a11, a12, a22)
        C = grid.directional_rows(nvec_x, nvec_y)
        rho = SelfSimilarField(grid, gas, bern, base, d.reshape(grid.shape)).density().ravel()

        rhs = src.copy()
        rhs[kind == 1] = dir_rhs[kind == 1]
        slip_sel = kind == 3
        rhs[slip_sel] = -(bgx * nvec_x + bgy * nvec_y)[slip_sel]
        shock_sel = kind == 2
        rhs[shock_sel] = (up_flux / rho - (bgx * nvec_x + bgy * nvec_y))[shock_sel]

        M = (mask_int @ A + rows_dir
             + sp.diags(((kind == 2) | (kind == 3)).astype(float)) @ C).tocsc()
        d_new = spla.spsolve(M, rhs)
        if not np.all(np.isfinite(d_new)):
            raise NonConvergenceError("linear solve produced non-finite values")
        step = d_new - d
        d = d_new
        # fresh-coefficient interior residual
        a11, a12, a22, _, _ = _coefficients(problem, grid, d.reshape(grid.shape), cfg)
        r = grid.operator(a11, a12, a22) @ d - src
        residual = float(np.max(np.abs(r[interior]))) if interior.any() else 0.0
        if residual <= cfg.tol_pde and np.max(np.abs(step)) <= 10 * cfg.tol_pde:
            break
    new_field = replace(field_, d=d.reshape(grid.shape))
    return new_field, residual


def shock_update(gas, bern, field_, shock, cfg, problem, relax=None):
    """Move shock vertices along their polar rays toward {phi = phi_upstream}.

    Newton step per vertex from the nodal potential mismatch and its radial
    derivative, under-relaxed; pinned vertices stay put.  Returns the new
    polyline and the largest actual displacement.
    """
    relax = cfg.relax if relax is None else relax
    grid = field_.grid
    idx = grid.edge_nodes(problem.shock_edge)
    x, y = grid.x.ravel()[idx], grid.y.ravel()[idx]
    phi = field_.phi.ravel()[idx]
    gx, gy = field_.total_gradient()
    gx, gy = gx.ravel()[idx], gy.ravel()[idx]
    up = problem.upstream
    e = phi - up.value(x, y)
    ux, uy = up.gradient(x, y)
    wx = np.cos(shock.psi)
    wy = np.sin(shock.psi)
    slope = (gx - ux) * wx + (gy - uy) * wy
    scale = max(1.0, float(np.max(np.abs(gx) + np.abs(gy))))
    if np.any(np.abs(slope[shock.movable]) < 1e-10 * scale):
        raise RayUpdateError("level set not transversal to a shock ray")
    dr = np.where(shock.movable, -e / slope, 0.0)
    new_r = shock.r + relax * dr
    new = ShockPolyline(center=shock.center, psi=shock.psi.copy(), r=new_r,
                        movable=shock.movable.copy())
    new.validate()
    disp = float(np.max(np.abs(relax * dr)))
    return new, disp


# ---------------------------------------------------------------------------
# Regular reflection (concave wedge) configuration
# ---------------------------------------------------------------------------

class _ReflectionProblem(FreeBoundaryProblem):
    def rebuild_edges(self, shock):
        pts = shock.points()
        foot = (float(pts[0, 0]), 0.0)
        p4 = self.meta["p4"]
        c2 = self.meta["center2"]
        r2 = self.meta["radius2"]
        a4 = np.arctan2(p4[1] - c2[1], p4[0] - c2[0])
        p1 = pts[-1]
        a1 = np.arctan2(p1[1] - c2[1], p1[0] - c2[0])
        return {
            "south": line_segment((0.0, 0.0), foot),
            "west": line_segment((0.0, 0.0), p4),
            "north": circle_arc(c2, r2, a4, a1),
            "east": polyline_edge(pts),
        }


def _reflection_local_pi_half(gas, rho0, rho1):
    nr = solve_normal_reflection(gas, rho0, rho1)
    return nr


def build_reflection_problem(gas, rho0, rho1, theta_w, cfg):
    """Problem spec plus initial guess for the supersonic regular reflection."""
    nr = solve_normal_reflection(gas, rho0, rho1)
    if theta_w == np.pi / 2:
        state2 = nr.state2
        bern, state0, state1 = nr.bern, nr.state0, nr.state1
        shock_dir = None
        p0 = None
    else:
        local = state2_regular_reflection(gas, rho0, rho1, theta_w)
        if local.classification == "detached":
            raise UnsupportedConfigurationError(
                f"no state (2) at theta_w={theta_w}: below the detachment angle")
        if local.classification != "supersonic":
            raise UnsupportedConfigurationError(
                f"{local.classification} local state: only the supersonic configuration "
                "has the sonic-arc topology this solver builds")
        ts = sonic_angle(gas, rho0, rho1)
        if abs(theta_w - ts) < cfg.near_sonic_guard:
            raise NearSonicError(
                f"theta_w within {cfg.near_sonic_guard} of the sonic angle {ts}")
        state2 = local.weak
        bern, state0, state1 = local.bern, local.state0, local.state1
        shock_dir = np.array(local.weak_shock.normal)
        p0 = np.array(local.p0)

    c2v = np.array([state2.u, state2.v])
    r2 = state2.sonic_radius(gas)
    e_w = np.array([np.cos(theta_w), np.sin(theta_w)])
    p4 = c2v + r2 * e_w
    if theta_w == np.pi / 2:
        xi_bar = nr.xi_bar
        p1 = np.array([xi_bar, np.sqrt(r2 ** 2 - xi_bar ** 2)])
        mono_e = np.array([0.0, 1.0])
    else:
        # straight reflected shock from P0, first crossing with the sonic circle
        tau = np.array([-shock_dir[1], shock_dir[0]])
        if tau[1] > 0:
            tau = -tau
        b = (p0 - c2v) @ tau
        disc = b * b - ((p0 - c2v) @ (p0 - c2v) - r2 ** 2)
        if disc <= 0:
            raise UnsupportedConfigurationError("reflected shock misses the sonic circle")
        t1 = -b - np.sqrt(disc)
        if t1 <= 0:
            t1 = -b + np.sqrt(disc)
        p1 = p0 + t1 * tau
        mono_e = (p1 - p0) / np.hypot(*(p1 - p0))

    center = np.array([state1.u, 0.0])
    psi1 = float(np.arctan2(p1[1] - center[1], p1[0] - center[0]))
    psi = np.linspace(np.pi, psi1, cfg.ny)
    r_foot = state1.u - nr.xi_bar
    r1 = float(np.hypot(*(p1 - center)))
    r = r_foot + (r1 - r_foot) * (psi - np.pi) / (psi1 - np.pi)
    movable = np.ones(cfg.ny, bool)
    movable[-1] = False                      # P1 pinned to the sonic circle
    shock = ShockPolyline(center=center, psi=psi, r=r, movable=movable)
    shock.validate()

    problem = _ReflectionProblem(
        gas=gas, bern=bern, base=state2, upstream=state1,
        edge_kinds={"south": ("slip",), "west": ("slip",),
                    "north": ("dirichlet", state2), "east": ("shock",)},
        shock_edge="east",
        sonic_circles=[((float(c2v[0]), float(c2v[1])), r2)],
        lower_states=[state2], upper_state=state1,
        monotone_dirs=[(np.array([0.0, 1.0]), -1.0), (mono_e, -1.0)],
        label="regular-reflection",
        meta={"p4": p4, "center2": c2v, "radius2": r2, "theta_w": theta_w,
              "p0": p0, "p1": p1, "state0": state0, "normal_reflection": nr},
    )
    return problem, shock


def build_initial_guess(gas, local, cfg):
    """Spec-surface wrapper: initial (shock, field) from local data.

    Accepts the output of build_reflection_problem/build_pm_problem callers;
    provided for symmetry with the driver functions below.
    """
    problem, shock = local
    grid = QuadGrid(nx=cfg.nx, ny=cfg.ny, **problem.rebuild_edges(shock))
    field_ = SelfSimilarField(grid=grid, gas=problem.gas, bern=problem.bern,
                              base=problem.base, d=np.zeros(grid.shape))
    if problem.label == "prandtl-meyer":
        lo = np.maximum.reduce([st.value(grid.x, grid.y) for st in problem.lower_states])
        field_.d = lo - problem.base.value(grid.x, grid.y)
    return field_, shock


def _outer_loop(problem, shock, cfg):
    gas, bern = problem.gas, problem.bern
    field_, shock = build_initial_guess(gas, (problem, shock), cfg)
    relax = cfg.relax
    history = []
    pde_res = np.inf
    disp = np.inf
    converged = False
    for it in range(cfg.max_outer):
        field_, pde_res = elliptic_solve(gas, bern, field_, shock, cfg, problem)
        try:
            shock_new, disp = shock_update(gas, bern, field_, shock, cfg, problem,
                                           relax=relax)
        except RayUpdateError:
            relax *= 0.5
            history.append((it, pde_res, None, relax))
            if relax < 1e-4:
                raise
            continue
        history.append((it, pde_res, disp, relax))
        shock = shock_new
        grid = QuadGrid(nx=cfg.nx, ny=cfg.ny, **problem.rebuild_edges(shock))
        field_ = SelfSimilarField(grid=grid, gas=gas, bern=bern, base=problem.base,
                                  d=field_.d)
        if disp <= cfg.tol_shock:
            field_, pde_res = elliptic_solve(gas, bern, field_, shock, cfg, problem)
            converged = pde_res <= cfg.tol_pde
            if converged:
                break
    diag = diagnostics_report(field_, shock, problem, cfg,
                              outer_iterations=len(history), converged=converged)
    if not converged:
        raise NonConvergenceError(
            f"free-boundary iteration did not converge (last disp={disp:.3e}, "
            f"pde residual={pde_res:.3e})", diagnostics=diag, history=history)
    return field_, shock, diag


def solve_regular_reflection(gas, rho0, rho1, theta_w, cfg=None):
    """Supersonic regular reflection: curved reflected shock plus phi in the
    subsonic pocket.  Returns (field, shock, diagnostics)."""
    cfg = cfg or SolverConfig()
    problem, shock = build_reflection_problem(gas, rho0, rho1, theta_w, cfg)
    return _outer_loop(problem, shock, cfg)


# ---------------------------------------------------------------------------
# Prandtl-Meyer (ramp) configuration, wall-aligned frame
# ---------------------------------------------------------------------------

class _PMProblem(FreeBoundaryProblem):
    def rebuild_edges(self, shock):
        pts = shock.points()
        m = self.meta
        c0, r0 = m["center0"], m["radius0"]
        c1, r1 = m["center1"], m["radius1"]
        f0 = (c0[0] - r0, 0.0)
        f1 = (c1[0] - r1, 0.0)
        pa, pb = pts[0], pts[-1]
        a0 = np.arctan2(pa[1] - c0[1], pa[0] - c0[0])
        a1 = np.arctan2(pb[1] - c1[1], pb[0] - c1[0])
        return {
            "south": line_segment(f0, f1),
            "west": circle_arc(c0, r0, np.pi, a0),
            "north": polyline_edge(pts),
            "east": circle_arc(c1, r1, np.pi, a1),
        }


def build_pm_problem(gas, u_inf, rho_inf, theta_w, cfg):
    """Problem spec plus initial guess for the supersonic ramp configuration.

    Works in the wall-aligned frame: the ramp surface is {eta = 0}, the
    incoming stream arrives at angle -theta_w, and the far normal shock is
    the horizontal line {eta = eta1}.
    """
    pm = pm_states(gas, u_inf, rho_inf, theta_w)
    ts, td = pm_angles(gas, u_inf, rho_inf)
    if theta_w >= ts - cfg.near_sonic_guard:
        if abs(theta_w - ts) < cfg.near_sonic_guard:
            raise NearSonicError(f"theta_w within {cfg.near_sonic_guard} of {ts}")
        raise UnsupportedConfigurationError(
            "subsonic ramp state: the two-sonic-arc topology needs theta_w below "
            f"the sonic angle {ts}")
    cw, sw = np.cos(theta_w), np.sin(theta_w)
    q0 = float(np.hypot(pm.weak.u, pm.weak.v))
    state0 = UniformState(u=q0, v=0.0, k=0.0, rho=pm.weak.rho)
    state_inf = UniformState(u=u_inf * cw, v=-u_inf * sw, k=0.0, rho=rho_inf)
    state1 = pm.state1
    eta1 = pm.eta1
    bern = pm.bern

    c0 = np.array([state0.u, 0.0])
    r0 = state0.sonic_radius(gas)
    c1 = np.array([state1.u, 0.0])
    r1 = state1.sonic_radius(gas)
    if r1 <= eta1:
        raise UnsupportedConfigurationError("normal shock outside the state-(1) sonic circle")
    # attached oblique shock: line through the tip along the velocity jump
    dq = np.array([state_inf.u - state0.u, state_inf.v - state0.v])
    nu0 = dq / np.hypot(*dq)
    tau0 = np.array([-nu0[1], nu0[0]])
    if tau0[1] < 0:
        tau0 = -tau0
    b = (-c0) @ tau0
    disc = b * b - (c0 @ c0 - r0 ** 2)
    if disc <= 0:
        raise UnsupportedConfigurationError("attached shock misses the sonic circle")
    t_a = -b + np.sqrt(disc)
    pa = t_a * tau0
    pb = np.array([c1[0] - np.sqrt(r1 ** 2 - eta1 ** 2), eta1])

    center = c1.copy()
    psi_a = float(np.arctan2(pa[1] - center[1], pa[0] - center[0]))
    psi_b = float(np.arctan2(pb[1] - center[1], pb[0] - center[0]))
    psi = np.linspace(psi_a, psi_b, cfg.nx)
    ra = float(np.hypot(*(pa - center)))
    rb = float(np.hypot(*(pb - center)))
    r = ra + (rb - ra) * (psi - psi_a) / (psi_b - psi_a)
    movable = np.ones(cfg.nx, bool)
    movable[0] = movable[-1] = False
    shock = ShockPolyline(center=center, psi=psi, r=r, movable=movable)
    shock.validate()

    problem = _PMProblem(
        gas=gas, bern=bern, base=state1, upstream=state_inf,
        edge_kinds={"south": ("slip",), "west": ("dirichlet", state0),
                    "north": ("shock",), "east": ("dirichlet", state1)},
        shock_edge="north",
        sonic_circles=[((float(c0[0]), 0.0), r0), ((float(c1[0]), 0.0), r1)],
        lower_states=[state0, state1], upper_state=state_inf,
        monotone_dirs=[(np.array([1.0, 0.0]), 1.0), (tau0, -1.0)],
        label="prandtl-meyer",
        meta={"center0": c0, "radius0": r0, "center1": c1, "radius1": r1,
              "eta1": eta1, "pa": pa, "pb": pb, "theta_w": theta_w,
              "pm": pm, "tau0": tau0},
    )
    return problem, shock


def solve_prandtl_meyer(gas, u_inf, rho_inf, theta_w, cfg=None):
    """Supersonic ramp flow: curved shock bridging the attached oblique shock
    and the far normal shock.  Returns (field, shock, diagnostics)."""
    cfg = cfg or SolverConfig()
    problem, shock = build_pm_problem(gas, u_inf, rho_inf, theta_w, cfg)
    return _outer_loop(problem, shock, cfg)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def diagnostics_report(field_, shock, problem, cfg, outer_iterations=0, converged=True):
    """Residuals and admissibility measures of the current iterate."""
    grid = field_.grid
    d = field_.d.ravel()
    a11, a12, a22, dist, active = _coefficients(problem, grid, field_.d, cfg)
    interior = _boundary_assignment(problem, grid)[0] == 0
    r = grid.operator(a11, a12, a22) @ d
    pde_res = float(np.max(np.abs(r[interior]))) if interior.any() else 0.0

    idx = grid.edge_nodes(problem.shock_edge)
    x, y = grid.x.ravel()[idx], grid.y.ravel()[idx]
    phi = field_.phi.ravel()[idx]
    up = problem.upstream
    rh_phi = float(np.max(np.abs(phi - up.value(x, y))))
    gx, gy = field_.total_gradient()
    nx_, ny_ = grid.edge_normals(problem.shock_edge)
    rho = field_.density().ravel()[idx]
    ux, uy = up.gradient(x, y)
    rh_flux = float(np.max(np.abs(
        rho * (gx.ravel()[idx] * nx_ + gy.ravel()[idx] * ny_)
        - up.rho * (ux * nx_ + uy * ny_))))

    mach = field_.mach()
    h = _domain_diameter(grid) / max(grid.nx, grid.ny)
    away = dist.reshape(grid.shape) > 3.0 * h
    margin = float(np.min((1.0 - mach)[away])) if away.any() else float("nan")

    lo = np.maximum.reduce([st.value(grid.x, grid.y) for st in problem.lower_states])
    hi = problem.upper_state.value(grid.x, grid.y)
    phi_all = field_.phi
    bounds = float(max(np.max(lo - phi_all), np.max(phi_all - hi), 0.0))

    mono = 0.0
    ux_a, uy_a = problem.upper_state.gradient(grid.x, grid.y)
    for e, sign in problem.monotone_dirs:
        proj = ((ux_a - gx) * e[0] + (uy_a - gy) * e[1]) * sign
        mono = max(mono, float(np.max(-proj)))
    mono = max(mono, 0.0)

    mismatch = 0.0
    for edge, spec_ in problem.edge_kinds.items():
        if spec_[0] != "dirichlet":
            continue
        st = spec_[1]
        idx = grid.edge_nodes(edge)
        sx, sy = st.gradient(grid.x.ravel()[idx], grid.y.ravel()[idx])
        mismatch = max(mismatch, float(np.max(np.hypot(
            gx.ravel()[idx] - sx, gy.ravel()[idx] - sy))))

    act_d = float(np.max(dist[active.ravel()])) if np.any(active) else 0.0
    return Diagnostics(
        pde_residual_inf=pde_res,
        rh_phi_residual_inf=rh_phi,
        rh_flux_residual_inf=rh_flux,
        ellipticity_min_margin=margin,
        bounds_violation=bounds,
        monotonicity_violation=mono,
        sonic_gradient_mismatch=mismatch,
        cutoff_active_distance=act_d,
        outer_iterations=outer_iterations,
        converged=converged,
    )
