"""Tests for the reflection-cluster geometry."""
import math

import numpy as np
import pytest

from src.errors import DegenerateGeometry, NonPhysical, OutOfSupport
from src.geometry import (
    UNBOUNDED,
    ClusterGeometry,
    diffuse_path,
    diffuse_paths,
    solve_specular,
    support_region,
    visible_region,
)
from src.propagation import grazing_angle, scatter_offset

ROOM_CENTER_1 = ClusterGeometry(d=3.8, h_t=7.1, h_r=4.2, l_neg=4, l_pos=3, theta_tx=45, side="left")
ROOM_CENTER_2 = ClusterGeometry(d=3.8, h_t=6.1, h_r=3.5, l_neg=3, l_pos=5.4, theta_tx=45, side="right")
ROOM_CORNER_1 = ClusterGeometry(d=7.1, h_t=7.1, h_r=1.2, l_neg=2.2, l_pos=4.8, theta_tx=45, side="left")
ROOM_CORNER_2 = ClusterGeometry(d=7.1, h_t=6.1, h_r=1.8, l_neg=6.2, l_pos=2.2, theta_tx=45, side="right")


# --- coordinate oracle ---
#
# Reflector on the x axis, receiver at (0, h_r), transmitter at (x_t, h_t).
# Everything below is plain vector geometry on those points.

def _unit(v):
    return v / np.linalg.norm(v)


def oracle_specular(d, h_t, h_r):
    """Mirror Tx across the reflector and intersect Rx-Tx' with it."""
    x_t = math.sqrt(d**2 - (h_t - h_r) ** 2)
    rx = np.array([0.0, h_r])
    tx = np.array([x_t, h_t])
    tx_image = np.array([x_t, -h_t])

    t = h_r / (h_r + h_t)
    point = rx + t * (tx_image - rx)

    to_point = _unit(point - rx)
    phi = math.degrees(math.acos(np.dot(to_point, [0.0, -1.0])))
    los = tx - rx
    sigma = math.degrees(math.atan2(los[1], los[0]))

    return {
        "x_t": x_t,
        "point_x": point[0],
        "l_sp": float(np.linalg.norm(tx_image - rx)),
        "d1": float(np.linalg.norm(point - rx)),
        "d2": float(np.linalg.norm(tx - point)),
        "phi": phi,
        "sigma": sigma,
    }


def oracle_diffuse(x_t, h_t, h_r, phi, alpha):
    """Follow the ray leaving Rx at phi - alpha from the normal down to the reflector."""
    u = math.radians(phi - alpha)
    rx = np.array([0.0, h_r])
    tx = np.array([x_t, h_t])
    direction = np.array([math.sin(u), -math.cos(u)])
    point = rx + (h_r / math.cos(u)) * direction
    incident = point - tx
    return {
        "point_x": point[0],
        "l1": float(np.linalg.norm(point - rx)),
        "l2": float(np.linalg.norm(tx - point)),
        "grazing": math.degrees(math.acos(abs(incident[0]) / np.linalg.norm(incident))),
    }


def oracle_in_support(geom, x_t, phi, sigma, alpha):
    """Membership by reflection point: hits the reflector, lit by the beam, on the reflector, on the Rx side of the LOS line."""
    u = phi - alpha
    if abs(u) >= 90:
        return False
    point_x = geom.h_r * math.tan(math.radians(u))
    specular_x = x_t * geom.h_r / (geom.h_t + geom.h_r)

    half = geom.theta_tx / 2
    beam_low = -math.inf if phi + half >= 90 else x_t - geom.h_t * math.tan(math.radians(phi + half))
    beam_high = math.inf if phi - half <= -90 else x_t - geom.h_t * math.tan(math.radians(phi - half))
    if not beam_low <= point_x <= beam_high:
        return False
    if not specular_x - geom.l_pos <= point_x <= specular_x + geom.l_neg:
        return False

    if sigma > 0:
        return point_x > -geom.h_r / math.tan(math.radians(sigma))
    if sigma < 0:
        return point_x < -geom.h_r / math.tan(math.radians(sigma))
    return True


def random_geometries(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        h_t = rng.uniform(0.5, 10.0)
        h_r = rng.uniform(0.5, 10.0)
        d = abs(h_t - h_r) + rng.uniform(0.1, 15.0)
        l_neg = UNBOUNDED if rng.random() < 0.2 else rng.uniform(0.0, 10.0)
        l_pos = UNBOUNDED if rng.random() < 0.2 else rng.uniform(0.0, 10.0)
        theta_tx = rng.uniform(1.0, 360.0)
        yield ClusterGeometry(d=d, h_t=h_t, h_r=h_r, l_neg=l_neg, l_pos=l_pos, theta_tx=theta_tx)


# --- ClusterGeometry ---

def test_cluster_geometry_valid_has_no_problems():
    """Test valid geometry reports nothing."""
    assert ROOM_CENTER_1.problems() == []


def test_cluster_geometry_reports_every_problem():
    """Test each violated invariant is listed."""
    geom = ClusterGeometry(d=-1, h_t=0, h_r=2, l_neg=-1, theta_tx=400, side="up")
    problems = geom.problems()

    assert any(p.startswith("d must") for p in problems)
    assert any(p.startswith("h_t must") for p in problems)
    assert any(p.startswith("l_neg must") for p in problems)
    assert any(p.startswith("theta_tx must") for p in problems)
    assert any(p.startswith("side must") for p in problems)


def test_cluster_geometry_degenerate_distance_is_a_problem():
    """Test d <= |h_t - h_r| is reported."""
    assert any("must exceed" in p for p in ClusterGeometry(d=2, h_t=5, h_r=3).problems())


# --- solve_specular ---

def test_solve_specular_room_center_cluster_1():
    """Test room-centre wall-1 geometry."""
    spec = solve_specular(ROOM_CENTER_1)

    assert spec.phi == pytest.approx(12.27, abs=0.05)
    assert spec.sigma == pytest.approx(49.74, abs=0.05)
    assert spec.l_sp == pytest.approx(11.564, abs=0.005)
    assert 90 - spec.phi + spec.sigma == pytest.approx(127, abs=1)


def test_solve_specular_room_center_cluster_2():
    """Test room-centre blackboard geometry."""
    spec = solve_specular(ROOM_CENTER_2)

    assert spec.phi == pytest.approx(16.1, abs=0.05)
    assert spec.sigma == pytest.approx(43.18, abs=0.05)
    assert spec.l_sp == pytest.approx(9.992, abs=0.005)
    assert 90 - spec.phi + spec.sigma == pytest.approx(117, abs=1)


@pytest.mark.parametrize("geom, phi, sigma", [
    (ROOM_CORNER_1, 25.45, 56.2),
    (ROOM_CORNER_2, 35.57, 37.28),
])
def test_solve_specular_room_corner(geom, phi, sigma):
    """Test room-corner geometries."""
    spec = solve_specular(geom)

    assert spec.phi == pytest.approx(phi, abs=0.05)
    assert spec.sigma == pytest.approx(sigma, abs=0.05)


def test_solve_specular_symmetric():
    """Test equal heights give zero tilt and equal legs."""
    spec = solve_specular(ClusterGeometry(d=10, h_t=5, h_r=5))

    assert spec.sigma == 0
    assert spec.d1 == pytest.approx(spec.l_sp / 2)
    assert spec.d2 == pytest.approx(spec.l_sp / 2)
    assert spec.s == pytest.approx(10)


def test_solve_specular_internal_identities():
    """Test the leg, foot and length identities."""
    for geom in random_geometries(200, seed=1):
        spec = solve_specular(geom)

        assert spec.d1 + spec.d2 == pytest.approx(spec.l_sp)
        assert spec.s1 + spec.s2 == pytest.approx(spec.s)
        assert spec.l_sp >= geom.d
        assert -90 < spec.phi < 90
        assert math.copysign(1, spec.sigma) == math.copysign(1, geom.h_t - geom.h_r)


def test_solve_specular_matches_coordinate_oracle():
    """Test specular lengths and angles against the image-method oracle."""
    for geom in random_geometries(1000, seed=2):
        spec = solve_specular(geom)
        oracle = oracle_specular(geom.d, geom.h_t, geom.h_r)

        assert spec.s == pytest.approx(oracle["x_t"], rel=1e-9)
        assert spec.l_sp == pytest.approx(oracle["l_sp"], rel=1e-9)
        assert spec.d1 == pytest.approx(oracle["d1"], rel=1e-9)
        assert spec.d2 == pytest.approx(oracle["d2"], rel=1e-9)
        assert spec.s2 == pytest.approx(oracle["point_x"], rel=1e-9, abs=1e-12)
        assert spec.phi == pytest.approx(oracle["phi"], rel=1e-9, abs=1e-7)
        assert spec.sigma == pytest.approx(oracle["sigma"], rel=1e-9, abs=1e-9)


def test_solve_specular_reciprocity():
    """Test swapping Tx and Rx heights keeps l_sp and s."""
    for geom in random_geometries(100, seed=3):
        mirrored = ClusterGeometry(d=geom.d, h_t=geom.h_r, h_r=geom.h_t)
        a, b = solve_specular(geom), solve_specular(mirrored)

        assert a.l_sp == pytest.approx(b.l_sp, rel=1e-12)
        assert a.s == pytest.approx(b.s, rel=1e-12)
        assert a.sigma == pytest.approx(-b.sigma, abs=1e-12)


@pytest.mark.parametrize("d", [2.0, 1.5])
def test_solve_specular_degenerate_raises(d):
    """Test d <= |h_t - h_r| is rejected."""
    with pytest.raises(DegenerateGeometry):
        solve_specular(ClusterGeometry(d=d, h_t=5, h_r=3))


# --- diffuse_path ---

def test_diffuse_path_at_zero_is_specular():
    """Test alpha = 0 reproduces the specular path."""
    spec = solve_specular(ROOM_CENTER_1)
    path = diffuse_path(ROOM_CENTER_1, spec, 0.0)

    assert path.l_dif == pytest.approx(spec.l_sp, rel=1e-12)
    assert path.s1_prime == pytest.approx(spec.s1, rel=1e-12)
    assert path.s2_prime == pytest.approx(spec.s2, rel=1e-12)
    assert path.l1 == pytest.approx(spec.d1, rel=1e-12)
    assert path.l2 == pytest.approx(spec.d2, rel=1e-12)


def test_diffuse_path_returns_floats():
    """Test the scalar version returns plain floats."""
    spec = solve_specular(ROOM_CENTER_1)
    path = diffuse_path(ROOM_CENTER_1, spec, 10.0)

    assert all(isinstance(value, float) for value in path)


def test_diffuse_path_outside_support_raises():
    """Test an offset beyond the support region is rejected."""
    spec = solve_specular(ROOM_CENTER_1)
    region = support_region(ROOM_CENTER_1, spec)

    with pytest.raises(OutOfSupport):
        diffuse_path(ROOM_CENTER_1, spec, region.alpha_plus + 1.0)


def test_diffuse_path_non_physical_raises():
    """Test |phi - alpha| >= 90 is rejected before the support check."""
    spec = solve_specular(ROOM_CENTER_1)

    with pytest.raises(NonPhysical):
        diffuse_path(ROOM_CENTER_1, spec, spec.phi - 90.0)


def test_diffuse_paths_match_coordinate_oracle():
    """Test lengths, reflection points and grazing angles over 1-degree sweeps."""
    for geom in random_geometries(1000, seed=4):
        spec = solve_specular(geom)
        region = support_region(geom, spec)

        alphas = np.arange(math.ceil(region.alpha_minus), math.floor(region.alpha_plus) + 1, 1.0)
        alphas = alphas[np.abs(spec.phi - alphas) < 89.0]
        if alphas.size == 0:
            continue

        paths = diffuse_paths(geom, spec, alphas)
        theta = grazing_angle(geom.h_t, paths.s1_prime)

        for k, alpha in enumerate(alphas):
            oracle = oracle_diffuse(spec.s, geom.h_t, geom.h_r, spec.phi, alpha)
            assert paths.l1[k] == pytest.approx(oracle["l1"], rel=1e-9)
            assert paths.l2[k] == pytest.approx(oracle["l2"], rel=1e-9)
            assert paths.l_dif[k] == pytest.approx(oracle["l1"] + oracle["l2"], rel=1e-9)
            assert paths.s2_prime[k] == pytest.approx(oracle["point_x"], rel=1e-9, abs=1e-9)
            assert theta[k] == pytest.approx(oracle["grazing"], rel=1e-9, abs=1e-6)


def test_diffuse_paths_cover_out_of_frame_cases():
    """Test reflections beyond the RNR and behind the RNT are both exercised and correct."""
    # Wide beam and long reflector reach both beyond-RNR (alpha > phi) and behind-RNT points
    geom = ClusterGeometry(d=6.0, h_t=2.0, h_r=3.0, theta_tx=300)
    spec = solve_specular(geom)
    region = support_region(geom, spec)

    alphas = np.array([region.alpha_minus + 0.5, spec.phi + 10.0])
    paths = diffuse_paths(geom, spec, alphas)

    assert paths.s1_prime[0] < 0
    assert paths.s2_prime[1] < 0
    for k, alpha in enumerate(alphas):
        oracle = oracle_diffuse(spec.s, geom.h_t, geom.h_r, spec.phi, alpha)
        assert paths.l_dif[k] == pytest.approx(oracle["l1"] + oracle["l2"], rel=1e-9)


def test_diffuse_path_never_shorter_than_specular():
    """Test the specular path is the shortest in the cluster."""
    for geom in random_geometries(200, seed=5):
        spec = solve_specular(geom)
        region = support_region(geom, spec)
        alphas = np.linspace(region.alpha_minus, region.alpha_plus, 51)
        alphas = alphas[(np.abs(spec.phi - alphas) < 90.0) & (np.abs(alphas) > 0.5)]

        paths = diffuse_paths(geom, spec, alphas)

        assert np.all(paths.l_dif > spec.l_sp)


def test_diffuse_delay_is_asymmetric_in_alpha():
    """Test tau(alpha) differs from tau(-alpha) for unequal heights."""
    geom = ClusterGeometry(d=35, h_t=8, h_r=6)
    spec = solve_specular(geom)

    plus = diffuse_path(geom, spec, 10.0).l_dif
    minus = diffuse_path(geom, spec, -10.0).l_dif

    assert plus - spec.l_sp > 0
    assert minus - spec.l_sp > 0
    assert abs(plus - minus) > 1e-3


# --- visible_region ---

def test_visible_region_zero_beamwidth():
    """Test a zero-width beam lights only the specular point."""
    geom = ClusterGeometry(d=3.8, h_t=7.1, h_r=4.2, theta_tx=0)
    spec = solve_specular(geom)

    w_t, w_r = visible_region(geom, spec)

    assert w_t == pytest.approx(0, abs=1e-12)
    assert w_r == pytest.approx(0, abs=1e-12)


def test_visible_region_room_center_cluster_1():
    """Test beam limits the Tx side and the reflector limits the Rx side."""
    spec = solve_specular(ROOM_CENTER_1)

    w_t, w_r = visible_region(ROOM_CENTER_1, spec)

    assert w_t == pytest.approx(2.826, abs=0.005)
    assert w_r == 3


def test_visible_region_beam_crossing_rnt():
    """Test phi < Theta/2 puts the beam edge behind the RNT."""
    geom = ClusterGeometry(d=10, h_t=4, h_r=4, theta_tx=120)
    spec = solve_specular(geom)
    assert spec.phi < 60

    w_t, _ = visible_region(geom, spec)
    beam_edge_x = spec.s - geom.h_t * math.tan(math.radians(spec.phi - 60))

    assert w_t > spec.s1
    assert spec.s2 + w_t == pytest.approx(beam_edge_x, rel=1e-12)


def test_visible_region_unbounded_beam():
    """Test a beam edge missing the reflector leaves the reflector length in charge."""
    geom = ClusterGeometry(d=3.8, h_t=7.1, h_r=4.2, l_neg=4, l_pos=3, theta_tx=360)
    spec = solve_specular(geom)

    assert visible_region(geom, spec) == (4, 3)
    assert visible_region(ClusterGeometry(d=3.8, h_t=7.1, h_r=4.2), spec) == (UNBOUNDED, UNBOUNDED)


# --- support_region ---

@pytest.mark.parametrize("geom, alpha_minus, alpha_plus", [
    (ROOM_CENTER_1, -29.4, 38.7),
    (ROOM_CENTER_2, -28.5, 47.05),
    (ROOM_CORNER_1, -41.1, 59.25),
    (ROOM_CORNER_2, -31.4, 62.46),
])
def test_support_region_classroom(geom, alpha_minus, alpha_plus):
    """Test support bounds of the classroom clusters."""
    region = support_region(geom, solve_specular(geom))

    assert region.alpha_minus == pytest.approx(alpha_minus, abs=0.15)
    assert region.alpha_plus == pytest.approx(alpha_plus, abs=0.15)
    assert not region.empty
    assert region.contains(0.0)


def test_support_region_specular_only():
    """Test zero visible length collapses the region onto alpha = 0."""
    geom = ClusterGeometry(d=3.8, h_t=7.1, h_r=4.2, l_neg=0, l_pos=0)
    region = support_region(geom, solve_specular(geom))

    assert region.alpha_minus == pytest.approx(0, abs=1e-12)
    assert region.alpha_plus == pytest.approx(0, abs=1e-12)
    assert region.empty
    assert region.width == pytest.approx(0, abs=1e-12)


def test_support_region_geometric_bounds():
    """Test the reflector-hit and LOS-line limits per height ordering."""
    for geom in random_geometries(300, seed=6):
        spec = solve_specular(geom)
        region = support_region(geom, spec)

        if geom.h_t >= geom.h_r:
            assert region.alpha_minus >= spec.phi - 90
            assert region.alpha_plus <= spec.phi - spec.sigma + 90
        else:
            assert region.alpha_minus >= spec.phi - spec.sigma - 90
            assert region.alpha_plus <= spec.phi + 90


def test_support_region_matches_membership_oracle():
    """Test every swept alpha is inside the region exactly when its reflection point is visible."""
    for geom in random_geometries(1000, seed=7):
        spec = solve_specular(geom)
        region = support_region(geom, spec)
        oracle = oracle_specular(geom.d, geom.h_t, geom.h_r)

        for alpha in np.arange(-179.0, 180.0, 1.0):
            if min(abs(alpha - region.alpha_minus), abs(alpha - region.alpha_plus)) < 1e-6:
                continue
            expected = oracle_in_support(geom, oracle["x_t"], spec.phi, spec.sigma, alpha)
            assert region.contains(alpha) == expected, (geom, alpha)


def test_support_region_is_monotone_in_visibility():
    """Test enlarging Theta, l_pos or l_neg never shrinks the region."""
    for geom in random_geometries(200, seed=8):
        spec = solve_specular(geom)
        base = support_region(geom, spec)

        for wider in (
            ClusterGeometry(geom.d, geom.h_t, geom.h_r, geom.l_neg, geom.l_pos, min(geom.theta_tx * 1.5, 360)),
            ClusterGeometry(geom.d, geom.h_t, geom.h_r, geom.l_neg + 1, geom.l_pos, geom.theta_tx),
            ClusterGeometry(geom.d, geom.h_t, geom.h_r, geom.l_neg, geom.l_pos + 1, geom.theta_tx),
        ):
            region = support_region(wider, spec)
            assert region.alpha_minus <= base.alpha_minus + 1e-12
            assert region.alpha_plus >= base.alpha_plus - 1e-12


# --- scatter offset against vector geometry ---

def test_scatter_offset_matches_vector_oracle():
    """Test scatter offsets, including reflections behind the RNT."""
    rng = np.random.default_rng(9)
    behind_rnt = 0
    out_of_frame = ClusterGeometry(d=6.0, h_t=2.0, h_r=3.0, theta_tx=300)
    for geom in [*random_geometries(300, seed=10), out_of_frame]:
        spec = solve_specular(geom)
        region = support_region(geom, spec)
        lo = max(region.alpha_minus, spec.phi - 89.0)
        hi = min(region.alpha_plus, spec.phi + 89.0)
        if lo >= hi:
            continue
        alphas = rng.uniform(lo, hi, 20)

        paths = diffuse_paths(geom, spec, alphas)
        theta = grazing_angle(geom.h_t, paths.s1_prime)
        psi = scatter_offset(spec.phi, alphas, theta, paths.s1_prime)

        for k in range(alphas.size):
            s1p, s2p = paths.s1_prime[k], paths.s2_prime[k]
            own_specular = math.degrees(math.atan2(s1p, geom.h_t))
            to_rx = math.degrees(math.atan2(s2p, geom.h_r))
            assert psi[k] == pytest.approx(own_specular - to_rx, abs=1e-9)
            behind_rnt += s1p < 0

    assert behind_rnt > 0
