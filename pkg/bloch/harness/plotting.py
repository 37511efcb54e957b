from pathlib import Path

from bloch.errors import TrajectoryIOError


PLOT_TEMPLATE = '''import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

CSV_PATH = {csv_path!r}
FIGURE_PATH = {figure_path!r}

df = pd.read_csv(CSV_PATH, float_precision="round_trip")
populations = [c for c in df.columns if c.startswith("rho_")]
df = df.melt(id_vars="t", value_vars=populations, var_name="Level", value_name="Population")

sns.set_theme(style="whitegrid")
ax = sns.lineplot(data=df, x="t", y="Population", hue="Level")
ax.set_xlabel("Time (periods)")
plt.tight_layout()
plt.savefig(FIGURE_PATH)
'''


def plot_script_path(csv_path):
    path = Path(csv_path)
    return path.with_name(f"{path.stem}_plot.py")


def write_plot_script(csv_path):
    script_path = plot_script_path(csv_path)
    figure_path = Path(csv_path).with_suffix(".png").name
    try:
        script_path.write_text(PLOT_TEMPLATE.format(csv_path=Path(csv_path).name, figure_path=figure_path))
    except OSError as error:
        raise TrajectoryIOError(str(script_path), error.strerror or str(error)) from error

    return script_path
