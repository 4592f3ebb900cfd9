"""Simulation pipeline: scenario in, profiles and cluster statistics out."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.channel import (
    ChannelResponse,
    ClusterConfig,
    ClusterResponse,
    LosRay,
    MimoChannelMatrix,
    cluster_response,
    compose_channel,
    los_ray,
    mimo_matrix,
)
from src.cir import (
    BinnedCIR,
    ClusterScenario,
    TheoreticalCIR,
    angle_spread,
    bin_cir,
    build_theoretical_cir,
    delta_alpha_for,
    discretize_support,
)
from src.config import EXIT_OK, EXIT_RUNTIME_ERROR, SCHEMA_VERSION, get_thread_count
from src.errors import EmptyCluster, EmptySupport
from src.geometry import solve_specular, support_region
from src.html_generator import generate_html
from src.propagation import RadioParams
from src.scenario import ScenarioFile, SimulationSettings
from src.storage import ProfileRecord, save_json, save_profile_csv, save_profile_json

logger = logging.getLogger(__name__)

LOS_LABEL = "los"


@dataclass(frozen=True)
class ClusterResult:
    config: ClusterConfig
    theoretical: TheoreticalCIR
    binned: BinnedCIR
    response: ClusterResponse
    visible: bool = True


@dataclass(frozen=True)
class SimulationResult:
    scenario: ScenarioFile
    los: LosRay | None
    clusters: tuple[ClusterResult, ...]  # scenario order
    channel: ChannelResponse
    mimo: MimoChannelMatrix


def simulate_cluster(config: ClusterConfig, radio: RadioParams, settings: SimulationSettings) -> ClusterResult:
    """
    Trace and bin one cluster.

    An invisible cluster (empty support region) yields an empty binned CIR.
    """
    geom = config.geometry
    solution = solve_specular(geom)
    region = support_region(geom, solution)
    delta_alpha = settings.delta_alpha or delta_alpha_for(region, settings.n_rays_d)

    visible = True
    try:
        grid = discretize_support(region, delta_alpha)
    except EmptySupport:
        logger.warning("Cluster %s is not visible: %s", config.label, region)
        grid = np.empty(0)
        visible = False

    theo = build_theoretical_cir(ClusterScenario(geom, config.material, radio), grid, delta_alpha)

    if visible:
        binned = bin_cir(theo, settings.delta_phi, settings.delta_tau, radio.p_rs, settings.combining)
    else:
        binned = BinnedCIR(mpcs=(), delta_phi=settings.delta_phi, delta_tau=settings.delta_tau, phi=theo.phi)

    if not binned.mpcs:
        logger.warning("Cluster %s has no MPC above %.1f dBm", config.label, radio.p_rs)

    response = cluster_response(config.label, theo, binned, geom.side)
    logger.info(
        "Cluster %s: %d rays, %d MPCs, AoA %.2f deg",
        config.label, len(theo.rays) + 1, binned.n_mpc, response.global_aoa,
    )
    return ClusterResult(config=config, theoretical=theo, binned=binned, response=response, visible=visible)


def simulate(scenario: ScenarioFile, threads: int | None = None) -> SimulationResult:
    """
    Run every cluster of a scenario and compose the channel.

    Clusters are simulated in parallel on a thread pool.

    Args:
        scenario: Validated scenario
        threads: Worker cap; defaults to RT_ICM_THREADS

    Raises:
        ModelError: If any cluster fails or clusters overlap in angle
    """
    los = los_ray(scenario.radio, scenario.los.d) if scenario.los.enabled else None

    workers = max(1, min(threads or get_thread_count(), len(scenario.clusters)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = tuple(pool.map(
            lambda config: simulate_cluster(config, scenario.radio, scenario.simulation),
            scenario.clusters,
        ))

    responses = [result.response for result in results]
    return SimulationResult(
        scenario=scenario,
        los=los,
        clusters=results,
        channel=compose_channel(los, responses),
        mimo=mimo_matrix(responses),
    )


def _los_records(los: LosRay | None) -> tuple[list[ProfileRecord], list[ProfileRecord]]:
    if los is None:
        return [], []
    return (
        [ProfileRecord(los.aoa, los.power_dbm, LOS_LABEL)],
        [ProfileRecord(los.delay * 1e9, los.power_dbm, LOS_LABEL)],
    )


def theoretical_profiles(result: SimulationResult) -> tuple[list[ProfileRecord], list[ProfileRecord]]:
    """
    Every traced ray on the global angle and absolute delay axes.

    Returns:
        Tuple of (angle profile, delay profile)
    """
    angle, delay = _los_records(result.los)
    for cluster in result.clusters:
        if not cluster.visible:
            continue
        theo, response = cluster.theoretical, cluster.response
        for ray in theo.components():
            angle.append(ProfileRecord(response.global_angle(theo.phi - ray.alpha), ray.power_dbm, response.label))
            delay.append(ProfileRecord((response.toa + ray.delay) * 1e9, ray.power_dbm, response.label))
    return angle, delay


def binned_profiles(result: SimulationResult) -> tuple[list[ProfileRecord], list[ProfileRecord]]:
    """
    Channel taps on the global angle and absolute delay axes.

    Returns:
        Tuple of (angle profile, delay profile)
    """
    angle, delay = [], []
    for tap in result.channel.taps():
        angle.append(ProfileRecord(tap.aoa, tap.power_dbm, tap.label))
        delay.append(ProfileRecord(tap.delay * 1e9, tap.power_dbm, tap.label))
    return angle, delay


def _los_stats(los: LosRay | None) -> dict | None:
    if los is None:
        return None
    return {"aoa_deg": los.aoa, "toa_ns": los.delay * 1e9, "power_dbm": los.power_dbm}


def cluster_stats(result: SimulationResult) -> dict:
    """
    Per-cluster statistics in scenario order.

    Relative powers are LOS minus cluster, in dB, and are None without a
    LOS ray. Spread and power figures are None for a cluster with no MPC.
    """
    los_dbm = result.los.power_dbm if result.los is not None else None

    clusters = []
    for cluster in result.clusters:
        binned, response, theo = cluster.binned, cluster.response, cluster.theoretical
        peak = binned.peak

        try:
            spread = angle_spread(binned)
        except EmptyCluster:
            spread = None

        peak_dbm = peak.power_dbm if peak is not None else None
        total_dbm = binned.total_power_dbm if binned.mpcs else None
        has_reference = los_dbm is not None and peak_dbm is not None

        clusters.append({
            "label": response.label,
            "side": response.side,
            "global_aoa_deg": response.global_aoa,
            "peak_aoa_deg": response.global_angle(peak.angle_bin_center) if peak is not None else None,
            "angle_spread_deg": spread,
            "peak_power_dbm": peak_dbm,
            "total_power_dbm": total_dbm,
            "relative_peak_db": los_dbm - peak_dbm if has_reference else None,
            "relative_total_db": los_dbm - total_dbm if has_reference else None,
            "toa_ns": response.toa * 1e9,
            "n_mpc": binned.n_mpc,
            "n_rays": theo.n_rays,
            "phi_deg": theo.phi,
            "sigma_deg": response.sigma,
            "alpha_minus_deg": theo.region.alpha_minus,
            "alpha_plus_deg": theo.region.alpha_plus,
        })

    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": result.scenario.name,
        "combining": result.scenario.simulation.combining,
        "los": _los_stats(result.los),
        "clusters": clusters,
    }


def channel_summary(result: SimulationResult) -> dict:
    """Composed channel in ToA order plus the MIMO matrix view."""
    clusters = []
    for response in result.channel.clusters:
        support = response.angular_support()
        total = response.binned.total_power_mw
        clusters.append({
            "label": response.label,
            "global_aoa_deg": response.global_aoa,
            "toa_ns": response.toa * 1e9,
            "angular_support_deg": list(support) if support is not None else None,
            "n_mpc": response.binned.n_mpc,
            "total_power_dbm": 10.0 * math.log10(total) if total > 0 else None,
        })

    trace = result.mimo.trace_power_mw
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": result.scenario.name,
        "n_cl": result.channel.n_cl,
        "n_taps": len(result.channel.taps()),
        "los": _los_stats(result.los),
        "clusters": clusters,
        "mimo": {
            "size": result.mimo.size,
            "diagonal": result.mimo.is_diagonal,
            "order": [entry.label for entry in (result.mimo.entries[j][j] for j in range(result.mimo.size))],
            "trace_power_dbm": 10.0 * math.log10(trace) if trace > 0 else None,
        },
    }


def write_outputs(
    result: SimulationResult,
    out_dir: Path,
    fmt: str = "csv",
    html: bool = False,
    written: list[Path] | None = None,
) -> list[Path]:
    """
    Write profiles, cluster stats and channel summary into out_dir.

    Args:
        result: Simulation result
        out_dir: Output directory, created if missing
        fmt: Profile format, "csv" or "json"
        html: Also write summary.html
        written: List that collects every path as soon as it is written

    Returns:
        The written paths
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"Unknown profile format: {fmt!r}")
    written = [] if written is None else written
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    save_profile = save_profile_csv if fmt == "csv" else save_profile_json
    theo_angle, theo_delay = theoretical_profiles(result)
    binned_angle, binned_delay = binned_profiles(result)

    for name, records, axis in (
        ("theoretical_angle_profile", theo_angle, "angle_deg"),
        ("theoretical_delay_profile", theo_delay, "delay_ns"),
        ("binned_angle_profile", binned_angle, "angle_deg"),
        ("binned_delay_profile", binned_delay, "delay_ns"),
    ):
        path = out_dir / f"{name}.{fmt}"
        written.append(path)
        save_profile(path, records, axis)

    stats = cluster_stats(result)
    summary = channel_summary(result)
    for name, doc in (("cluster_stats.json", stats), ("channel_summary.json", summary)):
        path = out_dir / name
        written.append(path)
        save_json(path, doc)

    if html:
        path = out_dir / "summary.html"
        written.append(path)
        generate_html(stats, path)

    return written


def run(
    scenario: ScenarioFile,
    out_dir: Path,
    fmt: str = "csv",
    html: bool = False,
    threads: int | None = None,
) -> int:
    """
    Simulate a scenario and write every output.

    On failure the outputs written so far are removed.

    Returns:
        Exit status: EXIT_OK, or EXIT_RUNTIME_ERROR on any model or I/O error
    """
    print(f"Simulating {scenario.name}...")

    written: list[Path] = []
    try:
        result = simulate(scenario, threads)
        write_outputs(result, out_dir, fmt, html, written)
    except (ValueError, OSError) as e:
        for path in written:
            Path(path).unlink(missing_ok=True)
        logger.debug("Simulation of %s failed", scenario.name, exc_info=True)
        print(f"✗ Simulation failed: {e}")
        return EXIT_RUNTIME_ERROR

    print("✓ Simulation completed successfully")
    if result.los is not None:
        print(f"  LOS: {result.los.power_dbm:.2f} dBm at {result.los.delay * 1e9:.2f} ns")
    for cluster in result.clusters:
        response = cluster.response
        print(f"  {response.label}: AoA {response.global_aoa:.1f} deg, {cluster.binned.n_mpc} MPCs")
    print(f"  Outputs: {out_dir}")
    return EXIT_OK
