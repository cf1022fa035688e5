"""Rankine-Hugoniot machinery for straight shocks between uniform states.

Normal orientation convention used everywhere: the unit normal points from
the upstream state into the downstream state, so the upstream pseudo-velocity
has a positive normal component.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SearchError
from .numerics import bisect, expand_bracket


def incident_velocity(gas, rho0, rho1):
    """Velocity u1 behind a vertical shock between densities rho0 (ahead) and rho1.

    Derived from the mass-flux jump plus the shared Bernoulli law; for gamma=2
    it reduces to the familiar (rho1-rho0)*sqrt(2(rho1-rho0)/(rho1^2-rho0^2)).
    """
    if rho1 == rho0:
        return 0.0
    dh = gas.enthalpy(rho1) - gas.enthalpy(rho0)
    return float((rho1 - rho0) * np.sqrt(2.0 * dh / (rho1 ** 2 - rho0 ** 2)))


@dataclass(frozen=True)
class IncidentData:
    """Incident-shock data: state-(1) speed, shock location, attachment threshold."""

    u1: float
    xi0: float
    rho_c: float
    degenerate: bool = False


def incident_shock(gas, rho0, rho1):
    """Incident-shock data for densities 0 < rho0 <= rho1.

    xi0 is computed from the mass flux (rho1*u1/(rho1-rho0)); it agrees with
    the sound-speed form rho1*sqrt(2(c1^2-c0^2)/((g-1)(rho1^2-rho0^2))) to
    round-off, which the tests pin down.
    """
    if rho0 <= 0:
        raise ValueError("rho0 must be positive")
    if rho1 < rho0:
        raise ValueError("rho1 < rho0 is entropy-violating for the incident shock")
    try:
        rc = critical_density(gas, rho0)
    except SearchError:
        # u1/c1 stays below 1 at every density (gamma >= 3): attachment is
        # ruled out for all strengths.
        rc = float("inf")
    if rho1 == rho0:
        return IncidentData(u1=0.0, xi0=float("nan"), rho_c=rc, degenerate=True)
    u1 = incident_velocity(gas, rho0, rho1)
    xi0 = rho1 * u1 / (rho1 - rho0)
    return IncidentData(u1=u1, xi0=float(xi0), rho_c=rc, degenerate=False)


def critical_density(gas, rho0, upper_factor=1e6):
    """Density rho_c with u1(rho_c) = c1(rho_c); u1 <= c1 iff rho1 <= rho_c.

    Bracketed bisection only; the sign change is verified before refining and
    a SearchError carries the scanned interval if expansion fails.
    """
    if rho0 <= 0:
        raise ValueError("rho0 must be positive")
    return _critical_density_cached(gas, float(rho0), float(upper_factor))


@lru_cache(maxsize=512)
def _critical_density_cached(gas, rho0, upper_factor):
    def f(r1):
        return incident_velocity(gas, rho0, r1) - gas.sound_speed(r1)

    lo = rho0 * (1.0 + 1e-9)
    if f(lo) >= 0:
        raise SearchError("u1 - c1 not negative just above rho0", (rho0, lo))
    lo, hi = expand_bracket(f, lo, rho0 * 2.0, hi_max=rho0 * upper_factor)
    return bisect(f, lo, hi, rtol=1e-12)


@dataclass(frozen=True)
class StraightShock:
    """Line {phi_A = phi_B} through `point` with unit `normal` (upstream -> downstream)."""

    point: tuple
    normal: tuple

    @classmethod
    def between(cls, upstream, downstream):
        """Construct the jump line between two uniform states sharing Bernoulli data."""
        du = np.array([upstream.u - downstream.u, upstream.v - downstream.v])
        dk = upstream.k - downstream.k
        n2 = du @ du
        if n2 == 0.0:
            raise ValueError("states have identical velocities; no jump line")
        # phi_A - phi_B = du . x + dk = 0
        point = -dk * du / n2
        nu = du / np.sqrt(n2)
        gx, gy = upstream.gradient(*point)
        if gx * nu[0] + gy * nu[1] < 0:
            nu = -nu
        return cls(point=(float(point[0]), float(point[1])), normal=(float(nu[0]), float(nu[1])))

    def contains(self, upstream, downstream, xi, eta, tol=1e-12):
        return abs(upstream.value(xi, eta) - downstream.value(xi, eta)) <= tol


def rh_residual(gas, bern, state_a, state_b, point, normal):
    """(dphi, dflux) at a point: potential jump and mass-flux jump, A minus B."""
    nu = np.asarray(normal, float)
    nn = np.hypot(nu[0], nu[1])
    if not np.isclose(nn, 1.0, rtol=0, atol=1e-12):
        raise ValueError("normal must be a unit vector")
    xi, eta = point
    dphi = state_a.value(xi, eta) - state_b.value(xi, eta)
    gax, gay = state_a.gradient(xi, eta)
    gbx, gby = state_b.gradient(xi, eta)
    dflux = state_a.rho * (gax * nu[0] + gay * nu[1]) - state_b.rho * (gbx * nu[0] + gby * nu[1])
    return float(dphi), float(dflux)


def entropy_admissible(gas, upstream, downstream, tol=1e-9):
    """True iff the density increases across the connecting shock.

    Raises ValueError unless the two states actually share a straight jump
    line (both R-H residuals vanish along it).
    """
    shock = StraightShock.between(upstream, downstream)
    nu = np.array(shock.normal)
    tau = np.array([-nu[1], nu[0]])
    p = np.array(shock.point)
    scale = max(1.0, upstream.rho, downstream.rho)
    for s in (-1.0, 0.0, 1.0):
        q = p + s * tau
        dphi, dflux = rh_residual(gas, None, upstream, downstream, q, nu)
        if abs(dphi) > tol * scale or abs(dflux) > tol * scale:
            raise ValueError("states are not connected by a straight shock")
    return downstream.rho > upstream.rho + tol * scale
