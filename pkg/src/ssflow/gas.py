"""Polytropic gas closure, Bernoulli density law, and uniform pseudo-potential states.

Scaling convention: the pressure constant is fixed so that the enthalpy and
sound speed reduce to h(rho) = (rho^(g-1) - 1)/(g-1) and c^2 = rho^(g-1).
gamma = 1 selects the isothermal branch (h = ln rho, c = 1).
"""

from dataclasses import dataclass

import numpy as np

from .errors import VacuumError


@dataclass(frozen=True)
class GasModel:
    """Adiabatic exponent and derived thermodynamic closure."""

    gamma: float = 2.0

    def __post_init__(self):
        if self.gamma < 1.0:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")

    @property
    def isothermal(self):
        return self.gamma == 1.0

    def enthalpy(self, rho):
        rho = np.asarray(rho, float)
        if np.any(rho <= 0):
            raise VacuumError("enthalpy requires rho > 0")
        if self.isothermal:
            return np.log(rho)[()]
        g = self.gamma
        return ((rho ** (g - 1) - 1.0) / (g - 1.0))[()]

    def sound_speed_sq(self, rho):
        rho = np.asarray(rho, float)
        if np.any(rho <= 0):
            raise VacuumError("sound speed requires rho > 0")
        if self.isothermal:
            return np.ones_like(rho)[()]
        return (rho ** (self.gamma - 1))[()]

    def sound_speed(self, rho):
        return np.sqrt(self.sound_speed_sq(rho))

    def pressure(self, rho):
        """p = rho^gamma / gamma under the fixed scaling (p = rho when isothermal)."""
        rho = np.asarray(rho, float)
        if self.isothermal:
            return rho[()]
        return (rho ** self.gamma / self.gamma)[()]


@dataclass(frozen=True)
class BernoulliData:
    """Shared Bernoulli constant: b is the raw constant, b0 the scaled one.

    b0 = (gamma - 1) * b + 1 for gamma > 1 and is degenerate (== 1) when
    isothermal, so both values are kept.
    """

    b: float
    b0: float

    @classmethod
    def from_constant(cls, gas, b):
        b0 = (gas.gamma - 1.0) * b + 1.0
        if b0 <= 0:
            raise ValueError(f"scaled Bernoulli constant must be positive, got {b0}")
        return cls(b=float(b), b0=float(b0))

    @classmethod
    def from_rest_state(cls, gas, rho):
        """Constant fixed by a state at rest with k = 0 (the usual normalization)."""
        return cls.from_constant(gas, float(gas.enthalpy(rho)))


def density_from_bernoulli(gas, bern, grad_sq, phi):
    """Density from the Bernoulli law, rho = (b0 - (g-1)(|Dphi|^2/2 + phi))^(1/(g-1)).

    Raises VacuumError when the base is non-positive; downstream iterations
    rely on that to reject a step instead of silently clamping.
    """
    grad_sq = np.asarray(grad_sq, float)
    phi = np.asarray(phi, float)
    head = 0.5 * grad_sq + phi
    if gas.isothermal:
        return np.exp(bern.b - head)[()]
    g = gas.gamma
    base = bern.b0 - (g - 1.0) * head
    if np.any(base <= 0):
        raise VacuumError("Bernoulli base <= 0 (vacuum)")
    return (base ** (1.0 / (g - 1.0)))[()]


def sound_speed_sq_from_bernoulli(gas, bern, grad_sq, phi):
    """c^2 at a point, same arguments as density_from_bernoulli."""
    grad_sq = np.asarray(grad_sq, float)
    phi = np.asarray(phi, float)
    if gas.isothermal:
        return np.ones_like(grad_sq + phi)[()]
    base = bern.b0 - (gas.gamma - 1.0) * (0.5 * grad_sq + phi)
    if np.any(base <= 0):
        raise VacuumError("Bernoulli base <= 0 (vacuum)")
    return base[()]


def ellipticity_ratio(gas, bern, grad_sq, phi, tol_sonic=1e-9):
    """|Dphi|/c and its classification: 'elliptic', 'sonic', or 'hyperbolic'.

    The sonic band is relative (|ratio - 1| <= tol_sonic) so classification is
    stable under round-off.
    """
    c2 = sound_speed_sq_from_bernoulli(gas, bern, grad_sq, phi)
    ratio = float(np.sqrt(np.asarray(grad_sq, float) / c2))
    if abs(ratio - 1.0) <= tol_sonic:
        kind = "sonic"
    elif ratio < 1.0:
        kind = "elliptic"
    else:
        kind = "hyperbolic"
    return ratio, kind


@dataclass(frozen=True)
class UniformState:
    """Constant-density state with pseudo-potential -(xi^2+eta^2)/2 + u xi + v eta + k."""

    u: float
    v: float
    k: float
    rho: float

    def __post_init__(self):
        if self.rho <= 0:
            raise VacuumError(f"uniform state needs rho > 0, got {self.rho}")

    @classmethod
    def from_bernoulli(cls, gas, bern, u, v, k):
        """Fix rho from the shared Bernoulli constant (head is constant for these states)."""
        head_sq = u * u + v * v
        rho = density_from_bernoulli(gas, bern, head_sq, k)
        return cls(u=float(u), v=float(v), k=float(k), rho=float(rho))

    def value(self, xi, eta):
        xi = np.asarray(xi, float)
        eta = np.asarray(eta, float)
        return (-0.5 * (xi * xi + eta * eta) + self.u * xi + self.v * eta + self.k)[()]

    def gradient(self, xi, eta):
        xi = np.asarray(xi, float)
        eta = np.asarray(eta, float)
        return (self.u - xi)[()], (self.v - eta)[()]

    def sonic_center(self):
        return np.array([self.u, self.v])

    def sonic_radius(self, gas):
        return float(gas.sound_speed(self.rho))

    def bernoulli_head(self):
        """|Dphi|^2/2 + phi, constant in space for a uniform state."""
        return 0.5 * (self.u ** 2 + self.v ** 2) + self.k

    def bernoulli_residual(self, gas, bern):
        """rho^(g-1) - (b0 - (g-1) head); zero when consistent with bern."""
        if gas.isothermal:
            return float(np.log(self.rho) - (bern.b - self.bernoulli_head()))
        g = gas.gamma
        return float(self.rho ** (g - 1) - (bern.b0 - (g - 1) * self.bernoulli_head()))


def eval_pseudo_potential(state, point):
    """(phi, Dphi) of a uniform state at a point (spec-surface convenience)."""
    xi, eta = point
    phi = state.value(xi, eta)
    gx, gy = state.gradient(xi, eta)
    return phi, (gx, gy)
