import os

import pandas as pd

from bloch.errors import TrajectoryIOError
from bloch.splitting.integrator import Trajectory


FLOAT_FORMAT = "%.17g"


def emit_csv(trajectory, path):
    try:
        trajectory.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as error:
        raise TrajectoryIOError(path, error.strerror or str(error)) from error


def read_csv(path):
    if not os.path.isfile(path):
        raise TrajectoryIOError(path, "no such file")
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
        return Trajectory.from_frame(frame)
    except (OSError, KeyError, ValueError) as error:
        raise TrajectoryIOError(path, str(error)) from error
