"""Tests for comparison against measured reference values."""
import math

import pytest

from src.compare import (
    DEFAULT_REFERENCE,
    compare,
    exceeds_thresholds,
    format_report,
    load_reference,
)
from src.errors import MissingReference


def _stats(scenario, clusters):
    return {
        "schema_version": 1,
        "scenario": scenario,
        "combining": "incoherent",
        "clusters": [
            {"label": label, "global_aoa_deg": aoa, "angle_spread_deg": spread, "relative_peak_db": power}
            for label, aoa, spread, power in clusters
        ],
    }


@pytest.fixture
def model_stats():
    """Model statistics for both classroom scenarios."""
    return [
        _stats("room_center", [("cluster-1", -127, 50, 18), ("cluster-2", 117, 43, 10)]),
        _stats("room_corner", [("cluster-1", -120, 69, 3), ("cluster-2", 91, 51, 0)]),
    ]


@pytest.fixture
def reference():
    return load_reference(DEFAULT_REFERENCE)


# --- load_reference ---

def test_load_reference_bundled_table(reference):
    """Test the bundled measurements cover both scenarios."""
    assert sorted(reference["scenarios"]) == ["room_center", "room_corner"]
    wall = reference["scenarios"]["room_center"]["clusters"]["cluster-1"]
    assert wall["aoa_deg"]["value"] == -128
    assert wall["aoa_deg"]["citation"]


def test_load_reference_without_scenarios(tmp_path):
    """Test a table without a scenarios object is rejected."""
    file_path = tmp_path / "reference.json"
    file_path.write_text('{"schema_version": 1}')

    with pytest.raises(ValueError, match="no 'scenarios' object"):
        load_reference(file_path)


# --- compare ---

def test_compare_aggregates(model_stats, reference):
    """Test max AoA, mean spread and RMS power errors."""
    report = compare(model_stats, reference)

    assert report["max_aoa_error_deg"] == 1
    assert report["mean_spread_error_deg"] == pytest.approx(8.5)
    assert report["rms_power_error_db"] == pytest.approx(math.sqrt(5))


def test_compare_rows(model_stats, reference):
    """Test per-cluster deltas are model minus measured."""
    rows = compare(model_stats, reference)["clusters"]

    assert [(r["scenario"], r["label"]) for r in rows] == [
        ("room_center", "cluster-1"),
        ("room_center", "cluster-2"),
        ("room_corner", "cluster-1"),
        ("room_corner", "cluster-2"),
    ]
    corner_wall = rows[2]
    assert corner_wall["measured_angle_spread_deg"] == 50
    assert corner_wall["spread_error_deg"] == 19
    assert corner_wall["power_error_db"] == -4
    assert rows[1]["aoa_error_deg"] == -1


def test_compare_is_order_invariant(model_stats, reference):
    """Test shuffled inputs give the same report."""
    shuffled = [dict(doc, clusters=list(reversed(doc["clusters"]))) for doc in reversed(model_stats)]

    assert compare(shuffled, reference) == compare(model_stats, reference)


def test_compare_single_document(model_stats, reference):
    """Test one stats document is accepted without a list."""
    report = compare(model_stats[0], reference)

    assert len(report["clusters"]) == 2
    assert report["max_aoa_error_deg"] == 1


def test_compare_skips_missing_model_values(reference):
    """Test a cluster with no MPC is left out of spread and power aggregates."""
    stats = _stats("room_center", [("cluster-1", -127, None, None), ("cluster-2", 117, 43, 10)])

    report = compare(stats, reference)

    assert report["clusters"][0]["spread_error_deg"] is None
    assert report["mean_spread_error_deg"] == pytest.approx(3)
    assert report["rms_power_error_db"] == pytest.approx(2)


def test_compare_unknown_scenario(reference):
    """Test a scenario without measurements raises MissingReference."""
    with pytest.raises(MissingReference, match="auditorium"):
        compare(_stats("auditorium", [("cluster-1", 10, 5, 1)]), reference)


def test_compare_unknown_cluster(reference):
    """Test a cluster label without measurements raises MissingReference."""
    with pytest.raises(MissingReference, match="room_center/cluster-3"):
        compare(_stats("room_center", [("cluster-3", 10, 5, 1)]), reference)


# --- exceeds_thresholds ---

def test_exceeds_thresholds_passes(model_stats, reference):
    """Test the synthetic model meets the default thresholds."""
    assert exceeds_thresholds(compare(model_stats, reference)) == []


def test_exceeds_thresholds_custom_limits(model_stats, reference):
    """Test tighter limits report the failing aggregates."""
    report = compare(model_stats, reference)
    limits = {"max_aoa_error_deg": 0.5, "mean_spread_error_deg": 10.0, "rms_power_error_db": 2.0}

    assert exceeds_thresholds(report, limits) == ["max_aoa_error_deg", "rms_power_error_db"]


def test_exceeds_thresholds_ignores_missing_aggregates():
    """Test an aggregate with no data never fails."""
    report = {"max_aoa_error_deg": None, "mean_spread_error_deg": None, "rms_power_error_db": None}

    assert exceeds_thresholds(report) == []


# --- format_report ---

def test_format_report(model_stats, reference):
    """Test report title, cluster lines and aggregates."""
    title, body = format_report(compare(model_stats, reference))

    assert title == "4 clusters compared"
    lines = body.splitlines()
    assert lines[0] == "- room_center/cluster-1: AoA +1.0 deg, spread -5.0 deg, power +0.0 dB"
    assert "Max AoA error: 1.00 deg" in lines
    assert "Mean spread error: 8.50 deg" in lines
    assert "RMS peak power error: 2.24 dB" in lines


def test_format_report_single_cluster(reference):
    """Test singular title and n/a for missing values."""
    stats = _stats("room_center", [("cluster-1", -127, None, None)])

    title, body = format_report(compare(stats, reference))

    assert title == "1 cluster compared"
    assert "spread n/a, power n/a" in body
    assert "Mean spread error: n/a" in body
