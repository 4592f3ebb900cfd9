"""
Basic geometric model of a first-order reflection cluster.

All lengths are meters and all angles are degrees. The reflector is a
straight line; the transmitter and receiver stand h_t and h_r away from it,
d apart. Offset AoA alpha is measured at the receiver from the specular
arrival direction, positive towards the receiver-side normal (RNR).
"""
import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from src.errors import DegenerateGeometry, NonPhysical, OutOfSupport

UNBOUNDED = math.inf

Side = Literal["left", "right"]


@dataclass(frozen=True)
class ClusterGeometry:
    d: float
    h_t: float
    h_r: float
    l_neg: float = UNBOUNDED
    l_pos: float = UNBOUNDED
    theta_tx: float = 360.0
    side: Side = "left"

    def problems(self) -> list[str]:
        """Return the violated geometry invariants (empty when valid)."""
        found = []
        if not self.d > 0:
            found.append(f"d must be > 0, got {self.d}")
        if not self.h_t > 0:
            found.append(f"h_t must be > 0, got {self.h_t}")
        if not self.h_r > 0:
            found.append(f"h_r must be > 0, got {self.h_r}")
        if not self.l_neg >= 0:
            found.append(f"l_neg must be >= 0, got {self.l_neg}")
        if not self.l_pos >= 0:
            found.append(f"l_pos must be >= 0, got {self.l_pos}")
        if not 0 < self.theta_tx <= 360:
            found.append(f"theta_tx must be in (0, 360], got {self.theta_tx}")
        if self.side not in ("left", "right"):
            found.append(f"side must be 'left' or 'right', got {self.side!r}")
        if self.d > 0 and not self.d > abs(self.h_t - self.h_r):
            found.append(f"d={self.d} must exceed |h_t - h_r|={abs(self.h_t - self.h_r)}")
        return found


@dataclass(frozen=True)
class SpecularSolution:
    s: float
    l_sp: float
    phi: float
    sigma: float
    d1: float
    d2: float
    s1: float
    s2: float


@dataclass(frozen=True)
class SupportRegion:
    alpha_minus: float
    alpha_plus: float
    w_t: float
    w_r: float

    @property
    def empty(self) -> bool:
        return self.alpha_minus >= self.alpha_plus

    @property
    def width(self) -> float:
        return max(self.alpha_plus - self.alpha_minus, 0.0)

    def contains(self, alpha: float) -> bool:
        return self.alpha_minus <= alpha <= self.alpha_plus


class DiffusePath(NamedTuple):
    l_dif: float
    l1: float
    l2: float
    s1_prime: float
    s2_prime: float


def solve_specular(geom: ClusterGeometry) -> SpecularSolution:
    """
    Solve the specular (Snell) reflection for a cluster geometry.

    Args:
        geom: Cluster geometry

    Returns:
        SpecularSolution with path lengths, AoA w.r.t. RNR and tilt angle

    Raises:
        DegenerateGeometry: If d <= |h_t - h_r|
    """
    h_t, h_r, d = geom.h_t, geom.h_r, geom.d
    if d <= abs(h_t - h_r):
        raise DegenerateGeometry(f"d={d} must exceed |h_t - h_r|={abs(h_t - h_r)}")

    s = math.sqrt(d**2 - (h_t - h_r) ** 2)
    l_sp = math.hypot(s, h_t + h_r)
    phi_rad = math.acos((h_t + h_r) / l_sp)
    sigma_rad = math.asin((h_t - h_r) / d)

    d1 = h_r * l_sp / (h_t + h_r)
    return SpecularSolution(
        s=s,
        l_sp=l_sp,
        phi=math.degrees(phi_rad),
        sigma=math.degrees(sigma_rad),
        d1=d1,
        d2=l_sp - d1,
        s1=h_t * math.tan(phi_rad),
        s2=d1 * math.sin(phi_rad),
    )


def diffuse_paths(geom: ClusterGeometry, spec: SpecularSolution, alphas) -> DiffusePath:
    """
    Vectorised diffuse path lengths for an array of offset AoAs.

    No support or physicality checks are made; callers mask the rays
    with |phi - alpha| >= 90 themselves.
    """
    u = np.radians(spec.phi - np.asarray(alphas, dtype=float))
    l1 = geom.h_r / np.cos(u)
    s2_prime = l1 * np.sin(u)
    s1_prime = spec.s - s2_prime
    l2 = np.hypot(geom.h_t, s1_prime)
    return DiffusePath(l_dif=l1 + l2, l1=l1, l2=l2, s1_prime=s1_prime, s2_prime=s2_prime)


def diffuse_path(
    geom: ClusterGeometry,
    spec: SpecularSolution,
    alpha: float,
    region: SupportRegion | None = None,
) -> DiffusePath:
    """
    Path of the diffuse ray arriving at offset AoA alpha.

    s1_prime may exceed s (reflection behind the RNR) or be negative
    (reflection behind the RNT); the lengths stay correct in both cases.

    Args:
        geom: Cluster geometry
        spec: Specular solution of geom
        alpha: Offset AoA in degrees
        region: Support region of geom; computed when omitted

    Raises:
        NonPhysical: If |phi - alpha| >= 90
        OutOfSupport: If alpha lies outside the support region
    """
    if abs(spec.phi - alpha) >= 90.0:
        raise NonPhysical(f"|phi - alpha| = {abs(spec.phi - alpha):.6f} >= 90")

    if region is None:
        region = support_region(geom, spec)
    if not region.contains(alpha):
        raise OutOfSupport(
            f"alpha={alpha} outside support [{region.alpha_minus}, {region.alpha_plus}]"
        )

    path = diffuse_paths(geom, spec, alpha)
    return DiffusePath(*(float(value) for value in path))


def visible_region(geom: ClusterGeometry, spec: SpecularSolution) -> tuple[float, float]:
    """
    Transmitter- and receiver-side visible lengths around the specular point.

    The transmit beam is assumed steered at the specular reflection point.
    A beam edge that never meets the reflector line leaves that side
    limited by the reflector alone.

    Returns:
        Tuple of (w_t, w_r) in meters, possibly UNBOUNDED
    """
    half = geom.theta_tx / 2.0

    if spec.phi - half <= -90.0:
        l_t = UNBOUNDED
    else:
        # s_t turns negative once the beam edge crosses the RNT; l_t still holds
        s_t = geom.h_t * math.tan(math.radians(spec.phi - half))
        l_t = spec.s1 - s_t

    if spec.phi + half >= 90.0:
        l_r = UNBOUNDED
    else:
        l_r = geom.h_t * math.tan(math.radians(spec.phi + half)) - spec.s1

    return min(l_t, geom.l_neg), min(l_r, geom.l_pos)


def support_region(geom: ClusterGeometry, spec: SpecularSolution) -> SupportRegion:
    """
    Offset AoA range reachable through the visible part of the reflector.

    Combines the visible-region bounds with the reflection-geometry bounds,
    keeping the tighter limit on each side.
    """
    w_t, w_r = visible_region(geom, spec)
    s2 = spec.d1 * math.sin(math.radians(spec.phi))

    alpha_neg = spec.phi - math.degrees(math.atan((s2 + w_t) / geom.h_r))
    alpha_pos = spec.phi - math.degrees(math.atan((s2 - w_r) / geom.h_r))

    if geom.h_t >= geom.h_r:
        alpha_minus = max(spec.phi - 90.0, alpha_neg)
        alpha_plus = min(spec.phi - spec.sigma + 90.0, alpha_pos)
    else:
        alpha_minus = max(spec.phi - spec.sigma - 90.0, alpha_neg)
        alpha_plus = min(spec.phi + 90.0, alpha_pos)

    return SupportRegion(alpha_minus=alpha_minus, alpha_plus=alpha_plus, w_t=w_t, w_r=w_r)
