"""Storage module for simulation results and profiles."""
import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Literal

ProfileAxis = Literal["angle_deg", "delay_ns"]


@dataclass(frozen=True)
class ProfileRecord:
    axis_value: float  # degrees on the global axis, or ns
    power_dbm: float
    label: str


def load_json(file_path: Path) -> dict:
    """
    Load a JSON document.

    Args:
        file_path: Path to JSON file

    Returns:
        Decoded document

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If JSON file is corrupt or malformed
    """
    file_path = Path(file_path)
    if not file_path.exists():
        raise FileNotFoundError(f"No such file: {file_path}")

    try:
        with open(file_path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Failed to parse JSON from {file_path}: {e}") from e


def save_json(file_path: Path, data: dict) -> None:
    """
    Save a document as indented JSON.

    Args:
        file_path: Path to JSON file
        data: JSON-serialisable document
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)

    with open(file_path, "w") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def sort_profile(records: list[ProfileRecord]) -> list[ProfileRecord]:
    """
    Order records series by series, ascending along the axis.

    Series keep the order in which their label first appears.
    """
    first_seen = {}
    for record in records:
        first_seen.setdefault(record.label, len(first_seen))
    return sorted(records, key=lambda r: (first_seen[r.label], r.axis_value))


def save_profile_csv(file_path: Path, records: list[ProfileRecord], axis: ProfileAxis) -> None:
    """
    Write a power profile as CSV with columns <axis>,power_dbm,label.

    Floats are written with fixed precision so reruns are byte-identical.
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)

    with open(file_path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([axis, "power_dbm", "label"])
        for record in sort_profile(records):
            writer.writerow([f"{record.axis_value:.6f}", f"{record.power_dbm:.6f}", record.label])


def load_profile_csv(file_path: Path) -> list[ProfileRecord]:
    """
    Read a profile written by save_profile_csv.

    Raises:
        ValueError: If the header or a row is malformed
    """
    with open(file_path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or header[1:] != ["power_dbm", "label"]:
            raise ValueError(f"Unexpected profile header in {file_path}: {header}")
        try:
            return [ProfileRecord(float(axis), float(power), label) for axis, power, label in reader]
        except ValueError as e:
            raise ValueError(f"Malformed profile row in {file_path}: {e}") from e


def save_profile_json(file_path: Path, records: list[ProfileRecord], axis: ProfileAxis) -> None:
    """Write a power profile as a JSON document."""
    rows = []
    for record in sort_profile(records):
        row = asdict(record)
        rows.append({axis: row["axis_value"], "power_dbm": row["power_dbm"], "label": row["label"]})
    save_json(file_path, {"axis": axis, "records": rows})
