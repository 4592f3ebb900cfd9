"""Generate a static HTML summary from cluster statistics."""
from html import escape
from pathlib import Path

STYLE = """\
        body { font-family: sans-serif; margin: 20px; }
        table { border-collapse: collapse; }
        th, td { padding: 6px 12px; border-bottom: 1px solid #ddd; text-align: left; }
        .empty-cluster { background-color: #fff3cd; }"""


def _value(value: float | None, fmt: str) -> str:
    return "&ndash;" if value is None else format(value, fmt)


def generate_html(stats: dict, output_file: Path) -> None:
    """
    Generate the summary page for one simulated scenario.

    Args:
        stats: Cluster-stats document from the simulator
        output_file: Path to output HTML file
    """
    html = generate_html_content(stats)

    output_file = Path(output_file)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    output_file.write_text(html)


def _cluster_row(cluster: dict) -> str:
    row_class = ' class="empty-cluster"' if cluster["n_mpc"] == 0 else ""
    cells = (
        escape(cluster["label"]),
        f"{cluster['global_aoa_deg']:.1f}&deg;",
        f"{_value(cluster['angle_spread_deg'], '.0f')}&deg;",
        f"{_value(cluster['peak_power_dbm'], '.2f')} dBm",
        f"{_value(cluster['relative_peak_db'], '.1f')} dB",
        f"{cluster['toa_ns']:.2f} ns",
        str(cluster["n_mpc"]),
    )
    return f"        <tr{row_class}>" + "".join(f"<td>{cell}</td>" for cell in cells) + "</tr>\n"


def generate_html_content(stats: dict) -> str:
    """
    Generate HTML content from cluster statistics.

    The page carries no timestamp, so reruns produce identical files.
    """
    scenario = escape(stats["scenario"])
    los = stats.get("los")
    if los:
        los_display = f'LOS: {los["power_dbm"]:.2f} dBm at {los["toa_ns"]:.2f} ns'
    else:
        los_display = "LOS: blocked"

    html = f"""<!DOCTYPE html>
<html lang="en">
<head>
    <meta charset="UTF-8">
    <title>Cluster summary - {scenario}</title>
    <style>
{STYLE}
    </style>
</head>
<body>
    <h1>{scenario}</h1>
    <p>{los_display}</p>
"""

    clusters = stats.get("clusters", [])
    if not clusters:
        html += "    <p>No clusters in this scenario.</p>\n"
    else:
        html += """    <table>
        <tr><th>Cluster</th><th>AoA</th><th>Spread</th><th>Peak</th><th>Relative to LOS</th><th>ToA</th><th>MPCs</th></tr>
"""
        html += "".join(_cluster_row(cluster) for cluster in clusters)
        html += "    </table>\n"

    html += "</body>\n</html>\n"
    return html
