"""Scenario document parsing, validation and serialisation."""
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from src.channel import ClusterConfig
from src.config import (
    DEFAULT_COMBINING,
    DEFAULT_DELTA_PHI_DEG,
    DEFAULT_DELTA_TAU_NS,
    DEFAULT_N_RAYS,
    SCHEMA_VERSION,
)
from src.errors import ParseError, ValidationError
from src.geometry import UNBOUNDED, ClusterGeometry
from src.propagation import Material, RadioParams

FIXTURE_DIR = Path(__file__).parent.parent / "data"
REFERENCE_NAME = "measured_reference"


@dataclass(frozen=True)
class SimulationSettings:
    n_rays_d: int = DEFAULT_N_RAYS
    delta_alpha: float | None = None  # degrees; takes precedence over n_rays_d
    delta_phi: float = DEFAULT_DELTA_PHI_DEG
    delta_tau: float = DEFAULT_DELTA_TAU_NS * 1e-9  # seconds
    combining: str = DEFAULT_COMBINING

    def problems(self) -> list[str]:
        found = []
        if self.delta_alpha is None and not self.n_rays_d > 0:
            found.append(f"simulation.n_rays_d must be > 0, got {self.n_rays_d}")
        if self.delta_alpha is not None and not self.delta_alpha > 0:
            found.append(f"simulation.delta_alpha_deg must be > 0, got {self.delta_alpha}")
        if not self.delta_phi > 0:
            found.append(f"simulation.delta_phi_deg must be > 0, got {self.delta_phi}")
        if not self.delta_tau > 0:
            found.append(f"simulation.delta_tau_ns must be > 0, got {self.delta_tau * 1e9}")
        if self.combining not in ("coherent", "incoherent"):
            found.append(f"simulation.combining must be 'coherent' or 'incoherent', got {self.combining!r}")
        return found


@dataclass(frozen=True)
class LosSettings:
    enabled: bool = False
    d: float | None = None


@dataclass(frozen=True)
class ScenarioFile:
    name: str
    radio: RadioParams
    simulation: SimulationSettings
    los: LosSettings
    clusters: tuple[ClusterConfig, ...]
    description: str = ""
    notes: dict[str, str] = field(default_factory=dict)  # per-cluster comments, keyed by label


class _Reader:
    """Pulls typed fields out of a JSON document, collecting problems."""

    def __init__(self):
        self.problems: list[str] = []

    def section(self, doc: dict, key: str, where: str, required: bool = True) -> dict:
        value = doc.get(key)
        if value is None:
            if required:
                self.problems.append(f"{where}{key}: missing")
            return {}
        if not isinstance(value, dict):
            self.problems.append(f"{where}{key}: expected an object")
            return {}
        return value

    def number(self, doc: dict, key: str, where: str, default=None, unbounded: bool = False):
        if key not in doc:
            if default is None:
                self.problems.append(f"{where}{key}: missing")
                return math.nan
            return default
        value = doc[key]
        if unbounded and value == "unbounded":
            return UNBOUNDED
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.problems.append(f"{where}{key}: expected a number, got {value!r}")
            return math.nan
        return float(value)

    def text(self, doc: dict, key: str, where: str, default: str | None = None) -> str:
        if key not in doc:
            if default is None:
                self.problems.append(f"{where}{key}: missing")
                return ""
            return default
        value = doc[key]
        if not isinstance(value, str):
            self.problems.append(f"{where}{key}: expected a string, got {value!r}")
            return ""
        return value


def parse_scenario(doc: dict) -> ScenarioFile:
    """
    Build a validated ScenarioFile from a decoded JSON document.

    Raises:
        ParseError: If the document is not an object or has the wrong schema version
        ValidationError: Listing every missing field and violated invariant
    """
    if not isinstance(doc, dict):
        raise ParseError("Scenario document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(
            f"Unsupported schema version {version!r}, expected {SCHEMA_VERSION}",
            field="schema_version",
        )

    reader = _Reader()
    name = reader.text(doc, "name", "", default="scenario")

    radio_doc = reader.section(doc, "radio", "")
    radio = RadioParams(
        p_t=reader.number(radio_doc, "p_t_dbm", "radio."),
        g_t=reader.number(radio_doc, "g_t_db", "radio."),
        g_r=reader.number(radio_doc, "g_r_db", "radio."),
        f_c=reader.number(radio_doc, "f_c_hz", "radio."),
        polarization=reader.text(radio_doc, "polarization", "radio."),
        p_rs=reader.number(radio_doc, "p_rs_dbm", "radio."),
    )

    sim_doc = reader.section(doc, "simulation", "", required=False)
    delta_alpha = sim_doc.get("delta_alpha_deg")
    n_rays_d = reader.number(sim_doc, "n_rays_d", "simulation.", default=DEFAULT_N_RAYS)
    simulation = SimulationSettings(
        n_rays_d=int(n_rays_d) if math.isfinite(n_rays_d) else 0,
        delta_alpha=None if delta_alpha is None else reader.number(sim_doc, "delta_alpha_deg", "simulation."),
        delta_phi=reader.number(sim_doc, "delta_phi_deg", "simulation.", default=DEFAULT_DELTA_PHI_DEG),
        delta_tau=reader.number(sim_doc, "delta_tau_ns", "simulation.", default=DEFAULT_DELTA_TAU_NS) * 1e-9,
        combining=reader.text(sim_doc, "combining", "simulation.", default=DEFAULT_COMBINING),
    )

    los_doc = reader.section(doc, "los", "", required=False)
    enabled = los_doc.get("enabled", False)
    if not isinstance(enabled, bool):
        reader.problems.append(f"los.enabled: expected true/false, got {enabled!r}")
        enabled = False
    los = LosSettings(
        enabled=enabled,
        d=reader.number(los_doc, "d_m", "los.") if enabled else los_doc.get("d_m"),
    )

    clusters_doc = doc.get("clusters", [])
    if not isinstance(clusters_doc, list):
        reader.problems.append("clusters: expected a list")
        clusters_doc = []

    clusters = []
    notes = {}
    for i, cluster_doc in enumerate(clusters_doc):
        where = f"clusters[{i}]."
        if not isinstance(cluster_doc, dict):
            reader.problems.append(f"clusters[{i}]: expected an object")
            continue
        label = reader.text(cluster_doc, "label", where, default=f"cluster-{i + 1}")
        geo_doc = reader.section(cluster_doc, "geometry", where)
        mat_doc = reader.section(cluster_doc, "material", where)
        geometry = ClusterGeometry(
            d=reader.number(geo_doc, "d_m", where + "geometry."),
            h_t=reader.number(geo_doc, "h_t_m", where + "geometry."),
            h_r=reader.number(geo_doc, "h_r_m", where + "geometry."),
            l_neg=reader.number(geo_doc, "l_neg_m", where + "geometry.", default=UNBOUNDED, unbounded=True),
            l_pos=reader.number(geo_doc, "l_pos_m", where + "geometry.", default=UNBOUNDED, unbounded=True),
            theta_tx=reader.number(geo_doc, "theta_tx_deg", where + "geometry."),
            side=reader.text(geo_doc, "side", where + "geometry."),
        )
        material = Material(
            eps_r=reader.number(mat_doc, "eps_r", where + "material."),
            sigma_h=reader.number(mat_doc, "sigma_h_mm", where + "material.") / 1000.0,
            m=reader.number(mat_doc, "m", where + "material."),
        )
        clusters.append(ClusterConfig(geometry=geometry, material=material, label=label))
        if "note" in cluster_doc:
            notes[label] = str(cluster_doc["note"])

    scenario = ScenarioFile(
        name=name,
        radio=radio,
        simulation=simulation,
        los=los,
        clusters=tuple(clusters),
        description=str(doc.get("description", "")),
        notes=notes,
    )

    problems = reader.problems + validate_scenario(scenario)
    if problems:
        raise ValidationError(problems)
    return scenario


def validate_scenario(scenario: ScenarioFile) -> list[str]:
    """Re-check every model invariant; returns the violations found."""
    # Fields already reported as missing or mistyped come through as NaN; skip the echo
    problems = [p for p in scenario.radio.problems() if "nan" not in p]
    problems += scenario.simulation.problems()

    if scenario.los.enabled and not (scenario.los.d is not None and scenario.los.d > 0):
        problems.append(f"los.d_m must be > 0, got {scenario.los.d}")

    seen = set()
    for i, cluster in enumerate(scenario.clusters):
        where = f"clusters[{i}] ({cluster.label})"
        if cluster.label in seen:
            problems.append(f"{where}: duplicate label")
        seen.add(cluster.label)
        for problem in cluster.geometry.problems() + cluster.material.problems():
            if "nan" not in problem:
                problems.append(f"{where}: {problem}")

    return problems


def load_scenario(file_path: Path) -> ScenarioFile:
    """
    Load and validate a scenario JSON file.

    Args:
        file_path: Path to the scenario document

    Returns:
        Validated ScenarioFile with defaults applied

    Raises:
        ParseError: If the file is missing or not valid JSON (with line number)
        ValidationError: If fields are missing or invariants are violated
    """
    file_path = Path(file_path)
    if not file_path.exists():
        raise ParseError(f"Scenario file not found: {file_path}")

    try:
        doc = json.loads(file_path.read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"Failed to parse JSON from {file_path}: {e.msg}", line=e.lineno) from e

    return parse_scenario(doc)


def _length_out(value: float):
    return "unbounded" if math.isinf(value) else value


def scenario_to_dict(scenario: ScenarioFile) -> dict:
    """Serialise a ScenarioFile back into its JSON document form."""
    simulation = {
        "n_rays_d": scenario.simulation.n_rays_d,
        "delta_phi_deg": scenario.simulation.delta_phi,
        "delta_tau_ns": round(scenario.simulation.delta_tau * 1e9, 9),
        "combining": scenario.simulation.combining,
    }
    if scenario.simulation.delta_alpha is not None:
        simulation["delta_alpha_deg"] = scenario.simulation.delta_alpha

    los = {"enabled": scenario.los.enabled}
    if scenario.los.d is not None:
        los["d_m"] = scenario.los.d

    clusters = []
    for cluster in scenario.clusters:
        geometry, material = cluster.geometry, cluster.material
        entry = {
            "label": cluster.label,
            "geometry": {
                "d_m": geometry.d,
                "h_t_m": geometry.h_t,
                "h_r_m": geometry.h_r,
                "l_neg_m": _length_out(geometry.l_neg),
                "l_pos_m": _length_out(geometry.l_pos),
                "theta_tx_deg": geometry.theta_tx,
                "side": geometry.side,
            },
            "material": {
                "eps_r": material.eps_r,
                "sigma_h_mm": round(material.sigma_h * 1000.0, 12),
                "m": material.m,
            },
        }
        if cluster.label in scenario.notes:
            entry["note"] = scenario.notes[cluster.label]
        clusters.append(entry)

    doc = {"schema_version": SCHEMA_VERSION, "name": scenario.name}
    if scenario.description:
        doc["description"] = scenario.description
    doc.update({
        "radio": {
            "p_t_dbm": scenario.radio.p_t,
            "g_t_db": scenario.radio.g_t,
            "g_r_db": scenario.radio.g_r,
            "f_c_hz": scenario.radio.f_c,
            "polarization": scenario.radio.polarization,
            "p_rs_dbm": scenario.radio.p_rs,
        },
        "simulation": simulation,
        "los": los,
        "clusters": clusters,
    })
    return doc


def with_overrides(
    scenario: ScenarioFile,
    n_rays: int | None = None,
    delta_phi: float | None = None,
    delta_tau_ns: float | None = None,
    combining: str | None = None,
) -> ScenarioFile:
    """
    Apply command-line overrides to the simulation settings.

    Raises:
        ValidationError: If an override is out of range
    """
    settings = scenario.simulation
    if n_rays is not None:
        settings = replace(settings, n_rays_d=n_rays, delta_alpha=None)
    if delta_phi is not None:
        settings = replace(settings, delta_phi=delta_phi)
    if delta_tau_ns is not None:
        settings = replace(settings, delta_tau=delta_tau_ns * 1e-9)
    if combining is not None:
        settings = replace(settings, combining=combining)

    problems = settings.problems()
    if problems:
        raise ValidationError(problems)
    return replace(scenario, simulation=settings)


def list_fixtures() -> list[str]:
    """Names of the bundled scenario fixtures."""
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.json") if p.stem != REFERENCE_NAME)


def fixture_path(name: str) -> Path:
    """
    Path of a bundled fixture.

    Raises:
        ValueError: If no fixture has that name
    """
    if name not in list_fixtures():
        raise ValueError(f"Unknown fixture {name!r}; available: {', '.join(list_fixtures())}")
    return FIXTURE_DIR / f"{name}.json"
