"""Compare simulated cluster statistics with measured reference values."""
import math
from pathlib import Path

from src.config import MAX_AOA_ERROR_DEG, MAX_MEAN_SPREAD_ERROR_DEG, MAX_RMS_POWER_ERROR_DB
from src.errors import MissingReference
from src.scenario import FIXTURE_DIR, REFERENCE_NAME
from src.storage import load_json

DEFAULT_REFERENCE = FIXTURE_DIR / f"{REFERENCE_NAME}.json"

# (stats field, reference field, report delta field)
METRICS = (
    ("global_aoa_deg", "aoa_deg", "aoa_error_deg"),
    ("angle_spread_deg", "angle_spread_deg", "spread_error_deg"),
    ("relative_peak_db", "relative_peak_db", "power_error_db"),
)

DEFAULT_THRESHOLDS = {
    "max_aoa_error_deg": MAX_AOA_ERROR_DEG,
    "mean_spread_error_deg": MAX_MEAN_SPREAD_ERROR_DEG,
    "rms_power_error_db": MAX_RMS_POWER_ERROR_DB,
}


def load_reference(file_path: Path = DEFAULT_REFERENCE) -> dict:
    """
    Load the measured reference table.

    Raises:
        ValueError: If the file is malformed or has no scenarios
    """
    reference = load_json(file_path)
    if not isinstance(reference.get("scenarios"), dict):
        raise ValueError(f"Reference table {file_path} has no 'scenarios' object")
    return reference


def _measured(entry: dict, field: str) -> float | None:
    value = entry.get(field)
    if isinstance(value, dict):
        value = value.get("value")
    return value


def compare(stats: dict | list[dict], reference: dict) -> dict:
    """
    Per-cluster deltas (model minus measured) and aggregate errors.

    Clusters are matched on (scenario, label); rows are reported sorted
    by that key so the aggregates do not depend on input order. A metric
    the model could not produce (None) is left out of the aggregates.

    Args:
        stats: One cluster-stats document or a list of them
        reference: Reference table from load_reference

    Returns:
        Report with 'clusters' rows and the three aggregates

    Raises:
        MissingReference: If a simulated cluster has no reference entry
    """
    documents = [stats] if isinstance(stats, dict) else list(stats)

    rows = []
    for document in documents:
        scenario = document["scenario"]
        table = reference["scenarios"].get(scenario)
        if table is None:
            raise MissingReference(f"No reference values for scenario {scenario!r}")

        for cluster in document["clusters"]:
            entry = table.get("clusters", {}).get(cluster["label"])
            if entry is None:
                raise MissingReference(f"No reference values for {scenario}/{cluster['label']}")

            row = {"scenario": scenario, "label": cluster["label"]}
            for model_field, reference_field, delta_field in METRICS:
                model = cluster.get(model_field)
                measured = _measured(entry, reference_field)
                row[model_field] = model
                row[f"measured_{reference_field}"] = measured
                row[delta_field] = model - measured if model is not None and measured is not None else None
            rows.append(row)

    rows.sort(key=lambda r: (r["scenario"], r["label"]))

    aoa = [abs(r["aoa_error_deg"]) for r in rows if r["aoa_error_deg"] is not None]
    spread = [abs(r["spread_error_deg"]) for r in rows if r["spread_error_deg"] is not None]
    power = [r["power_error_db"] for r in rows if r["power_error_db"] is not None]

    return {
        "clusters": rows,
        "max_aoa_error_deg": max(aoa) if aoa else None,
        "mean_spread_error_deg": sum(spread) / len(spread) if spread else None,
        "rms_power_error_db": math.sqrt(sum(e**2 for e in power) / len(power)) if power else None,
    }


def exceeds_thresholds(report: dict, thresholds: dict | None = None) -> list[str]:
    """Names of the aggregates above their threshold (empty when all pass)."""
    thresholds = DEFAULT_THRESHOLDS if thresholds is None else thresholds
    return [
        name for name, limit in thresholds.items()
        if report.get(name) is not None and report[name] > limit
    ]


def _fmt(value: float | None, unit: str) -> str:
    return "n/a" if value is None else f"{value:+.1f} {unit}"


def format_report(report: dict) -> tuple[str, str]:
    """
    Format a comparison report as text.

    Returns:
        Tuple of (title, body); the body has one markdown list item per cluster
        followed by the aggregates.
    """
    count = len(report["clusters"])
    title = f"{count} cluster{'s' if count != 1 else ''} compared"

    lines = []
    for row in report["clusters"]:
        lines.append(
            f"- {row['scenario']}/{row['label']}: "
            f"AoA {_fmt(row['aoa_error_deg'], 'deg')}, "
            f"spread {_fmt(row['spread_error_deg'], 'deg')}, "
            f"power {_fmt(row['power_error_db'], 'dB')}"
        )

    def aggregate(name: str, unit: str) -> str:
        value = report[name]
        return "n/a" if value is None else f"{value:.2f} {unit}"

    lines.append("")
    lines.append(f"Max AoA error: {aggregate('max_aoa_error_deg', 'deg')}")
    lines.append(f"Mean spread error: {aggregate('mean_spread_error_deg', 'deg')}")
    lines.append(f"RMS peak power error: {aggregate('rms_power_error_db', 'dB')}")

    body = "\n".join(lines)
    return title, body
