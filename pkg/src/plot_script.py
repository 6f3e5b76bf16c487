"""Emit a standalone matplotlib script that plots a sweep CSV."""

from string import Template

_SCRIPT = Template('''\
"""Plot |delta_a| from $csv_name (generated by run_phase.py sweep)."""

import csv

import matplotlib.pyplot as plt

rows = []
with open($csv_path, newline="") as handle:
    for row in csv.DictReader(line for line in handle if not line.startswith("#")):
        rows.append({key: float(value) for key, value in row.items()})

abars = sorted({row["abar"] for row in rows})
thetas = sorted({row["theta"] for row in rows})

fig, (by_theta, by_abar) = plt.subplots(1, 2, figsize=(11, 4.5))
for abar in abars:
    points = [row for row in rows if row["abar"] == abar]
    by_theta.plot([p["theta"] for p in points], [abs(p["delta_a_exact"]) for p in points],
                  label=f"abar = {abar:g}")
by_theta.set_xlabel("theta (rad)")
by_theta.set_ylabel("|delta_a| (rad)")
by_theta.legend()

for theta in thetas[:: max(1, len(thetas) // 5)]:
    points = [row for row in rows if row["theta"] == theta]
    by_abar.plot([p["abar"] for p in points], [abs(p["delta_a_exact"]) for p in points],
                 marker="o", label=f"theta = {theta:.3f}")
by_abar.set_xlabel("abar = a / (c omega0)")
by_abar.set_ylabel("|delta_a| (rad)")
by_abar.legend()

fig.tight_layout()
fig.savefig($png_path, dpi=150)
''')


def render_plot_script(csv_path: str) -> str:
    """Script text that reads csv_path and writes <csv_path>.png next to it."""
    return _SCRIPT.substitute(
        csv_name=csv_path.replace("\\", "/").rsplit("/", 1)[-1],
        csv_path=repr(csv_path),
        png_path=repr(f"{csv_path}.png"),
    )
