"""
Cluster channel impulse responses.

The theoretical CIR holds one ray per offset AoA on a dense grid over the
support region; the binned CIR keeps one resolvable MPC per angle bin.

Binning weights every ray by the stretch of the support region it stands
for, so MPC powers do not depend on how densely the region was sampled.
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.config import SPEED_OF_LIGHT
from src.errors import EmptyCluster, EmptySupport, TotalAbsorption
from src.geometry import (
    ClusterGeometry,
    SpecularSolution,
    SupportRegion,
    diffuse_paths,
    solve_specular,
    support_region,
)
from src.propagation import Material, RadioParams, propagate

logger = logging.getLogger(__name__)

Combining = Literal["coherent", "incoherent"]


@dataclass(frozen=True)
class ClusterScenario:
    geometry: ClusterGeometry
    material: Material
    radio: RadioParams


@dataclass(frozen=True)
class RayComponent:
    alpha: float  # degrees
    length: float  # meters
    delay: float  # seconds, relative to the specular ray
    amplitude: float
    phase: float  # degrees
    power_dbm: float


@dataclass(frozen=True)
class TheoreticalCIR:
    specular: RayComponent
    rays: tuple[RayComponent, ...]
    t_sp: float
    phi: float
    n_rays: int
    solution: SpecularSolution | None = None
    region: SupportRegion | None = None

    def components(self) -> list[RayComponent]:
        """Specular and diffuse rays together, ascending in alpha."""
        return sorted((self.specular, *self.rays), key=lambda ray: ray.alpha)

    def as_arrays(self) -> dict[str, np.ndarray]:
        rays = self.components()
        return {
            "alpha": np.array([r.alpha for r in rays]),
            "delay": np.array([r.delay for r in rays]),
            "amplitude": np.array([r.amplitude for r in rays]),
            "phase": np.array([r.phase for r in rays]),
            "power_dbm": np.array([r.power_dbm for r in rays]),
        }


@dataclass(frozen=True)
class MPC:
    angle_bin_center: float  # degrees, AoA w.r.t. RNR
    delay_bin_center: float  # seconds, relative to the specular ray
    amplitude: float
    phase: float  # degrees
    power_dbm: float
    n_rays: int = 1


@dataclass(frozen=True)
class BinnedCIR:
    mpcs: tuple[MPC, ...]
    delta_phi: float
    delta_tau: float
    phi: float

    @property
    def n_mpc(self) -> int:
        return len(self.mpcs)

    @property
    def peak(self) -> MPC | None:
        if not self.mpcs:
            return None
        return max(self.mpcs, key=lambda mpc: mpc.power_dbm)

    @property
    def total_power_mw(self) -> float:
        return float(sum(mpc.amplitude**2 for mpc in self.mpcs))

    @property
    def total_power_dbm(self) -> float:
        total = self.total_power_mw
        return 10.0 * math.log10(total) if total > 0 else -math.inf


def delta_alpha_for(region: SupportRegion, n_rays: int) -> float:
    """Grid spacing that puts n_rays offset AoAs across the support region."""
    if n_rays <= 0:
        raise ValueError(f"n_rays must be > 0, got {n_rays}")
    if region.width == 0:
        return 1.0
    return region.width / n_rays


def grid_size(region: SupportRegion, delta_alpha: float) -> int:
    """Number of grid points over the region, alpha = 0 included."""
    return math.floor(region.width / delta_alpha + 1e-9)


def discretize_support(region: SupportRegion, delta_alpha: float) -> np.ndarray:
    """
    Offset AoA grid alpha_minus + k * delta_alpha over the support region.

    The point alpha = 0 is left out; the specular ray is added separately.

    Raises:
        EmptySupport: If alpha_minus > alpha_plus
    """
    if delta_alpha <= 0:
        raise ValueError(f"delta_alpha must be > 0, got {delta_alpha}")
    if region.alpha_minus > region.alpha_plus:
        raise EmptySupport(
            f"Support region [{region.alpha_minus}, {region.alpha_plus}] is empty"
        )

    grid = region.alpha_minus + np.arange(grid_size(region, delta_alpha)) * delta_alpha
    return grid[np.abs(grid) >= 1e-12]


def build_theoretical_cir(
    scenario: ClusterScenario,
    grid,
    delta_alpha: float | None = None,
) -> TheoreticalCIR:
    """
    Trace every offset AoA of the grid through the cluster.

    Rays on the singular geometric bound (|phi - alpha| >= 90) and rays
    dropped by the propagation chain are omitted.

    Args:
        scenario: Cluster geometry, material and radio parameters
        grid: Offset AoAs from discretize_support
        delta_alpha: Grid spacing the grid was built with; n_rays then
            counts the full grid, including a removed alpha = 0 point

    Returns:
        TheoreticalCIR with the specular ray and the surviving diffuse rays

    Raises:
        TotalAbsorption: If the specular ray itself carries no power
    """
    geom, material, radio = scenario.geometry, scenario.material, scenario.radio
    solution = solve_specular(geom)
    region = support_region(geom, solution)

    grid = np.asarray(grid, dtype=float)
    alphas = grid[np.abs(solution.phi - grid) < 90.0]

    specular = propagate(
        geom.h_t, solution.phi, [0.0], [solution.s1], [solution.l_sp],
        solution.l_sp, material, radio,
    )
    if not specular.kept[0]:
        raise TotalAbsorption("Specular ray carries no power")

    paths = diffuse_paths(geom, solution, alphas)
    diffuse = propagate(
        geom.h_t, solution.phi, alphas, paths.s1_prime, paths.l_dif,
        solution.l_sp, material, radio, gamma_sp=specular.gamma[0],
    )

    alphas = alphas[diffuse.kept]
    lengths = paths.l_dif[diffuse.kept]
    delays = np.maximum(lengths - solution.l_sp, 0.0) / SPEED_OF_LIGHT

    rays = tuple(
        RayComponent(
            alpha=float(alphas[k]),
            length=float(lengths[k]),
            delay=float(delays[k]),
            amplitude=float(diffuse.amplitude[k]),
            phase=float(diffuse.phase[k]),
            power_dbm=float(diffuse.power_dbm[k]),
        )
        for k in range(alphas.size)
    )

    logger.debug(
        "Traced %d of %d grid rays, specular %.2f dBm",
        len(rays), grid.size, specular.power_dbm[0],
    )

    return TheoreticalCIR(
        specular=RayComponent(
            alpha=0.0,
            length=solution.l_sp,
            delay=0.0,
            amplitude=float(specular.amplitude[0]),
            phase=0.0,
            power_dbm=float(specular.power_dbm[0]),
        ),
        rays=rays,
        t_sp=solution.l_sp / SPEED_OF_LIGHT,
        phi=solution.phi,
        n_rays=grid_size(region, delta_alpha) if delta_alpha else int(grid.size),
        solution=solution,
        region=region,
    )


def bin_index(alpha, delta_phi: float) -> np.ndarray:
    """Angle bin of each offset AoA; bin 0 is centred on the specular ray."""
    return np.floor(-np.asarray(alpha, dtype=float) / delta_phi + 0.5).astype(int)


def angular_shares(alpha, index, delta_phi: float, lower: float, upper: float) -> np.ndarray:
    """
    Width in degrees of the support stretch each ray stands for.

    A ray covers the points of [lower, upper] closer to it than to its
    neighbours, cut at the edges of its own angle bin.

    Args:
        alpha: Offset AoAs in ascending order
        index: Angle bin of each ray, from bin_index
        delta_phi: Angle resolution in degrees
        lower: Lower end of the support region
        upper: Upper end of the support region
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.size == 0:
        return np.empty(0)

    bin_low = (-index - 0.5) * delta_phi
    bin_high = (0.5 - index) * delta_phi
    mid = (alpha[1:] + alpha[:-1]) / 2.0
    same_bin = index[1:] == index[:-1]

    left = np.concatenate(([bin_low[0]], np.where(same_bin, mid, bin_low[1:])))
    right = np.concatenate((np.where(same_bin, mid, bin_high[:-1]), [bin_high[-1]]))
    left = np.maximum(left, lower)
    right = np.minimum(right, upper)
    return np.maximum(right - left, 0.0)


def bin_cir(
    theo: TheoreticalCIR,
    delta_phi: float,
    delta_tau: float,
    p_rs: float,
    combining: Combining = "incoherent",
) -> BinnedCIR:
    """
    Bin the theoretical CIR into resolvable MPCs.

    Angle bins are delta_phi wide with the specular ray at the centre of
    its bin. Rays count towards their bin in proportion to their angular
    share (see angular_shares). Each angle bin yields one MPC whose delay
    is the power-weighted mean ray delay, snapped to the nearest multiple
    of delta_tau. MPCs below the receiver sensitivity p_rs are removed.

    Args:
        theo: Theoretical cluster CIR
        delta_phi: Angle resolution in degrees
        delta_tau: Delay resolution in seconds
        p_rs: Receiver sensitivity in dBm
        combining: "incoherent" takes the share-weighted mean ray power;
            "coherent" takes the share-weighted mean ray phasor
    """
    if delta_phi <= 0:
        raise ValueError(f"delta_phi must be > 0, got {delta_phi}")
    if delta_tau <= 0:
        raise ValueError(f"delta_tau must be > 0, got {delta_tau}")
    if combining not in ("coherent", "incoherent"):
        raise ValueError(f"Unknown combining: {combining!r}")

    arrays = theo.as_arrays()
    alpha, amplitude = arrays["alpha"], arrays["amplitude"]
    power = amplitude**2
    phasors = amplitude * np.exp(1j * np.radians(arrays["phase"]))
    index = bin_index(alpha, delta_phi)

    if theo.region is not None:
        lower, upper = theo.region.alpha_minus, theo.region.alpha_plus
    else:
        lower, upper = alpha[0], alpha[-1]
    shares = angular_shares(alpha, index, delta_phi, lower, upper)

    mpcs = []
    for j in np.unique(index):
        in_bin = index == j
        weights = shares[in_bin]
        if weights.sum() <= 0:
            # rays squeezed onto a single point
            weights = np.ones(weights.size)
        weights = weights / weights.sum()

        mean_phasor = complex(np.sum(weights * phasors[in_bin]))
        if combining == "coherent":
            bin_amplitude = abs(mean_phasor)
        else:
            bin_amplitude = math.sqrt(float(np.sum(weights * power[in_bin])))

        if bin_amplitude <= 0:
            continue
        power_dbm = 20.0 * math.log10(bin_amplitude)
        if power_dbm < p_rs:
            continue

        delay_weights = weights * power[in_bin]
        mean_delay = float(np.average(arrays["delay"][in_bin], weights=delay_weights))
        mpcs.append(MPC(
            angle_bin_center=theo.phi + int(j) * delta_phi,
            delay_bin_center=math.floor(mean_delay / delta_tau + 0.5) * delta_tau,
            amplitude=bin_amplitude,
            phase=float(np.degrees(np.angle(mean_phasor)) % 360.0),
            power_dbm=power_dbm,
            n_rays=int(np.count_nonzero(in_bin)),
        ))

    return BinnedCIR(mpcs=tuple(mpcs), delta_phi=delta_phi, delta_tau=delta_tau, phi=theo.phi)


def angle_spread(binned: BinnedCIR) -> float:
    """
    Threshold-span angle spread: first to last surviving bin, plus one bin.

    Raises:
        EmptyCluster: If no MPC survived pruning
    """
    if not binned.mpcs:
        raise EmptyCluster("No MPC above receiver sensitivity")
    centers = [mpc.angle_bin_center for mpc in binned.mpcs]
    return max(centers) - min(centers) + binned.delta_phi
