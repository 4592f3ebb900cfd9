"""
Per-ray electromagnetic bookkeeping.

Every function accepts plain floats or numpy arrays and works
elementwise. Angles are degrees; losses are linear attenuation factors
(>= 1 for a lossy mechanism) unless a name ends in _db.
"""
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.config import NEGLIGIBLE, SPEED_OF_LIGHT
from src.errors import InvalidMaterial, TotalAbsorption, ZeroPattern

logger = logging.getLogger(__name__)

Polarization = Literal["vertical", "horizontal"]


@dataclass(frozen=True)
class Material:
    eps_r: float
    sigma_h: float  # meters
    m: float

    def problems(self) -> list[str]:
        found = []
        if not self.eps_r >= 1:
            found.append(f"eps_r must be >= 1, got {self.eps_r}")
        if not self.sigma_h >= 0:
            found.append(f"sigma_h must be >= 0, got {self.sigma_h}")
        if not self.m >= 1:
            found.append(f"m must be >= 1, got {self.m}")
        return found


@dataclass(frozen=True)
class RadioParams:
    p_t: float  # dBm
    g_t: float  # dB
    g_r: float  # dB
    f_c: float  # Hz
    polarization: Polarization
    p_rs: float  # dBm

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    @property
    def eirp_dbm(self) -> float:
        """Transmit power plus both antenna gains."""
        return self.p_t + self.g_t + self.g_r

    def problems(self) -> list[str]:
        found = []
        if not self.f_c > 0:
            found.append(f"f_c must be > 0, got {self.f_c}")
        if not np.isfinite(self.p_rs):
            found.append(f"p_rs must be finite, got {self.p_rs}")
        if self.polarization not in ("vertical", "horizontal"):
            found.append(f"polarization must be 'vertical' or 'horizontal', got {self.polarization!r}")
        return found


@dataclass(frozen=True)
class RayPropagation:
    """Propagation results for the rays that survived the drop rules."""
    kept: np.ndarray  # boolean mask over the input rays
    theta: np.ndarray
    psi: np.ndarray
    gamma: np.ndarray
    loss_free_space: np.ndarray
    loss_reflection: np.ndarray
    loss_scattering: np.ndarray
    power_dbm: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray


def to_db(value):
    return 10.0 * np.log10(value)


def grazing_angle(h_t, s1_prime):
    """Grazing angle of the incident ray; 90 at normal incidence."""
    return np.degrees(np.arctan2(h_t, np.abs(s1_prime)))


def scatter_offset(phi, alpha_k, theta_k, s1_prime=None):
    """
    Angle between a ray's own specular reflection and the direction to Rx.

    When the reflection point lies behind the RNT (s1_prime < 0) the ray's
    specular reflection heads away from the receiver and the offset is
    measured on the other side of the local normal.
    """
    psi = 90.0 - (phi - alpha_k) - theta_k
    if s1_prime is None:
        return psi
    behind_rnt = np.asarray(s1_prime) < 0
    return np.where(behind_rnt, theta_k - 90.0 - (phi - alpha_k), psi)


def directive_pattern(psi_k, m):
    """Directive diffuse scattering lobe ((1 + cos psi)/2)^m, 1 at psi = 0."""
    return ((1.0 + np.cos(np.radians(psi_k))) / 2.0) ** m


def fresnel(theta_k, eps_r: float, polarization: Polarization):
    """
    Fresnel reflection coefficient at grazing angle theta_k.

    Raises:
        InvalidMaterial: If eps_r < 1
    """
    if eps_r < 1:
        raise InvalidMaterial(f"eps_r must be >= 1, got {eps_r}")

    theta = np.radians(theta_k)
    sin_t = np.sin(theta)
    root = np.sqrt(eps_r - np.cos(theta) ** 2)

    if polarization == "vertical":
        gamma = (-eps_r * sin_t + root) / (eps_r * sin_t + root)
    elif polarization == "horizontal":
        gamma = (sin_t - root) / (sin_t + root)
    else:
        raise ValueError(f"Unknown polarization: {polarization!r}")

    return gamma + 0j


def reflection_loss(gamma):
    """
    Linear reflection loss 1/|gamma|^2.

    Raises:
        TotalAbsorption: If |gamma| is zero anywhere
    """
    magnitude = np.abs(gamma)
    if np.any(magnitude == 0):
        raise TotalAbsorption("Reflection coefficient is zero")
    return 1.0 / magnitude**2


def roughness_factor(theta_k, sigma_h, wavelength):
    """Rayleigh roughness attenuation of the coherent reflection."""
    g = 4.0 * np.pi * sigma_h / wavelength * np.sin(np.radians(theta_k))
    return np.exp(-0.5 * g**2)


def scattering_loss(rho_s_k, rho_k):
    """
    Linear scattering loss (1 / (rho_s * rho))^2.

    Raises:
        ZeroPattern: If the scattering pattern is zero anywhere
    """
    if np.any(np.asarray(rho_k) == 0):
        raise ZeroPattern("Directive scattering pattern is zero")
    return (1.0 / (rho_s_k * rho_k)) ** 2


def free_space_loss(l_k, wavelength):
    """Friis spreading attenuation (4 pi l / lambda)^2, 1 at l = lambda/4pi."""
    return (4.0 * np.pi * l_k / wavelength) ** 2


def ray_power(radio: RadioParams, loss_free_space, loss_reflection, loss_scattering):
    """
    Received ray power.

    Returns:
        Tuple of (power in dBm, linear amplitude sqrt(P) with P in mW)
    """
    power_dbm = (
        radio.eirp_dbm
        - to_db(loss_free_space)
        - to_db(loss_reflection)
        - to_db(loss_scattering)
    )
    amplitude = np.sqrt(10.0 ** (power_dbm / 10.0))
    return power_dbm, amplitude


def ray_phase(l_k, l_sp, wavelength, gamma_k, gamma_sp):
    """Phase offset from path difference and reflection, w.r.t. the specular ray."""
    path = 360.0 * (l_k - l_sp) / wavelength
    reflection = np.degrees(np.angle(gamma_k) - np.angle(gamma_sp))
    return np.mod(path + reflection, 360.0)


def propagate(
    h_t: float,
    phi: float,
    alphas,
    s1_prime,
    lengths,
    l_sp: float,
    material: Material,
    radio: RadioParams,
    gamma_sp: complex | None = None,
) -> RayPropagation:
    """
    Run the grazing -> scatter -> loss -> power -> phase chain for many rays.

    Rays with a negligible scattering pattern or reflection coefficient are
    dropped and reported through the `kept` mask.

    Args:
        h_t: Tx distance to the reflector line
        phi: Specular AoA w.r.t. RNR
        alphas: Offset AoAs
        s1_prime: Reflection point distance from the RNT, per ray
        lengths: Ray path lengths
        l_sp: Specular path length
        material: Reflector material
        radio: Radio parameters
        gamma_sp: Specular reflection coefficient; when omitted each
            ray's own coefficient is its phase reference (used for the
            specular ray itself)
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    s1_prime = np.atleast_1d(np.asarray(s1_prime, dtype=float))
    lengths = np.atleast_1d(np.asarray(lengths, dtype=float))

    theta = grazing_angle(h_t, s1_prime)
    psi = scatter_offset(phi, alphas, theta, s1_prime)
    rho = directive_pattern(psi, material.m)
    gamma = fresnel(theta, material.eps_r, radio.polarization)

    kept = (rho >= NEGLIGIBLE) & (np.abs(gamma) >= NEGLIGIBLE)
    dropped = int(np.count_nonzero(~kept))
    if dropped:
        logger.debug("Dropped %d of %d rays with negligible pattern or reflection", dropped, kept.size)

    theta, psi, rho, gamma, lengths = theta[kept], psi[kept], rho[kept], gamma[kept], lengths[kept]

    loss_l = free_space_loss(lengths, radio.wavelength)
    loss_r = reflection_loss(gamma)
    loss_s = scattering_loss(roughness_factor(theta, material.sigma_h, radio.wavelength), rho)
    power_dbm, amplitude = ray_power(radio, loss_l, loss_r, loss_s)

    reference = gamma if gamma_sp is None else gamma_sp
    phase = ray_phase(lengths, l_sp, radio.wavelength, gamma, reference)

    return RayPropagation(
        kept=kept,
        theta=theta,
        psi=psi,
        gamma=gamma,
        loss_free_space=loss_l,
        loss_reflection=loss_r,
        loss_scattering=loss_s,
        power_dbm=power_dbm,
        amplitude=amplitude,
        phase=phase,
    )
