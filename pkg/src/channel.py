"""
Channel composition from the LOS ray and single-reflection clusters.

Global angles are measured at the receiver from the LOS direction (0),
negative for reflectors on the left of the LOS line, positive on the right.
"""
import itertools
import math
from dataclasses import dataclass

from src.cir import BinnedCIR, TheoreticalCIR
from src.config import SPEED_OF_LIGHT
from src.errors import ClusterOverlap
from src.geometry import ClusterGeometry, Side
from src.propagation import Material, RadioParams, free_space_loss, to_db


@dataclass(frozen=True)
class ClusterConfig:
    geometry: ClusterGeometry
    material: Material
    label: str


@dataclass(frozen=True)
class LosRay:
    delay: float  # seconds
    power_dbm: float
    aoa: float = 0.0

    @property
    def amplitude(self) -> float:
        return math.sqrt(10.0 ** (self.power_dbm / 10.0))


@dataclass(frozen=True)
class Tap:
    delay: float  # seconds, absolute ToA
    aoa: float  # degrees, global axis
    amplitude: float
    phase: float
    power_dbm: float
    label: str


def _side_sign(side: Side) -> float:
    return -1.0 if side == "left" else 1.0


@dataclass(frozen=True)
class ClusterResponse:
    label: str
    global_aoa: float  # degrees
    toa: float  # seconds, specular ray ToA
    sigma: float  # degrees
    side: Side
    binned: BinnedCIR

    def global_angle(self, rnr_angle: float) -> float:
        """Map an AoA measured from this cluster's RNR onto the global axis."""
        return global_aoa(rnr_angle, self.sigma, self.side)

    def angular_support(self) -> tuple[float, float] | None:
        """Global angle interval covered by the surviving bins."""
        if not self.binned.mpcs:
            return None
        half = self.binned.delta_phi / 2.0
        angles = [self.global_angle(mpc.angle_bin_center) for mpc in self.binned.mpcs]
        return min(angles) - half, max(angles) + half

    def taps(self) -> list[Tap]:
        """The binned CIR shifted by this cluster's ToA and AoA."""
        return [
            Tap(
                delay=self.toa + mpc.delay_bin_center,
                aoa=self.global_angle(mpc.angle_bin_center),
                amplitude=mpc.amplitude,
                phase=mpc.phase,
                power_dbm=mpc.power_dbm,
                label=self.label,
            )
            for mpc in self.binned.mpcs
        ]


@dataclass(frozen=True)
class ChannelResponse:
    los: LosRay | None
    clusters: tuple[ClusterResponse, ...]

    @property
    def n_cl(self) -> int:
        return len(self.clusters)

    def taps(self) -> list[Tap]:
        """All channel taps, LOS first, then clusters in ToA order."""
        taps = []
        if self.los is not None:
            taps.append(Tap(
                delay=self.los.delay,
                aoa=self.los.aoa,
                amplitude=self.los.amplitude,
                phase=0.0,
                power_dbm=self.los.power_dbm,
                label="los",
            ))
        for cluster in self.clusters:
            taps.extend(cluster.taps())
        return taps


@dataclass(frozen=True)
class MimoChannelMatrix:
    entries: tuple[tuple[ClusterResponse | None, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def is_diagonal(self) -> bool:
        return all(
            (entry is not None) == (p == q)
            for p, row in enumerate(self.entries)
            for q, entry in enumerate(row)
        )

    @property
    def trace_power_mw(self) -> float:
        return sum(self.entries[j][j].binned.total_power_mw for j in range(self.size))


def los_ray(radio: RadioParams, d: float) -> LosRay:
    """LOS ray over Tx-Rx distance d."""
    if d <= 0:
        raise ValueError(f"d must be > 0, got {d}")
    power_dbm = radio.eirp_dbm - to_db(free_space_loss(d, radio.wavelength))
    return LosRay(delay=d / SPEED_OF_LIGHT, power_dbm=float(power_dbm))


def global_aoa(phi: float, sigma: float, side: Side) -> float:
    """Specular AoA of a cluster on the global axis, LOS = 0."""
    return _side_sign(side) * (90.0 - phi + sigma)


def cluster_response(label: str, theo: TheoreticalCIR, binned: BinnedCIR, side: Side) -> ClusterResponse:
    """Place a binned cluster on the global ToA/AoA axes."""
    sigma = theo.solution.sigma
    return ClusterResponse(
        label=label,
        global_aoa=global_aoa(theo.phi, sigma, side),
        toa=theo.t_sp,
        sigma=sigma,
        side=side,
        binned=binned,
    )


def wrap_interval(lo: float, hi: float) -> list[tuple[float, float]]:
    """
    Split a global angle interval into pieces within [-180, 180].

    An interval crossing the +-180 direction comes back as two pieces.
    """
    if hi - lo >= 360.0:
        return [(-180.0, 180.0)]
    start = (lo + 180.0) % 360.0 - 180.0
    end = start + (hi - lo)
    if end <= 180.0:
        return [(start, end)]
    return [(start, 180.0), (-180.0, end - 360.0)]


def _intervals_overlap(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return any(
        max(lo_a, lo_b) < min(hi_a, hi_b)
        for lo_a, hi_a in wrap_interval(*a)
        for lo_b, hi_b in wrap_interval(*b)
    )


def check_overlap(clusters) -> None:
    """
    Raise if two clusters share part of the global angle axis.

    Angles are compared modulo 360. Touching bin edges are allowed;
    clusters with no surviving MPC occupy no angle.

    Raises:
        ClusterOverlap: For the first overlapping pair found
    """
    supports = [(c.label, c.angular_support()) for c in clusters]
    supports = [(label, span) for label, span in supports if span is not None]
    for (label_a, span_a), (label_b, span_b) in itertools.combinations(supports, 2):
        if _intervals_overlap(span_a, span_b):
            first, second = sorted((label_a, label_b))
            raise ClusterOverlap(first, second)


def compose_channel(los: LosRay | None, clusters) -> ChannelResponse:
    """
    Compose the channel response from the LOS ray and the clusters.

    Raises:
        ClusterOverlap: If any two clusters overlap in angle
    """
    clusters = list(clusters)
    check_overlap(clusters)
    ordered = sorted(clusters, key=lambda c: (c.toa, c.global_aoa, c.label))
    return ChannelResponse(los=los, clusters=tuple(ordered))


def mimo_matrix(clusters) -> MimoChannelMatrix:
    """
    Diagonal MIMO channel matrix, one beamformed link per cluster.

    Off-diagonal interference links are absent (None).

    Raises:
        ClusterOverlap: If the clusters are not spatially separated
    """
    clusters = list(clusters)
    check_overlap(clusters)
    n = len(clusters)
    entries = tuple(
        tuple(clusters[p] if p == q else None for q in range(n))
        for p in range(n)
    )
    return MimoChannelMatrix(entries=entries)
