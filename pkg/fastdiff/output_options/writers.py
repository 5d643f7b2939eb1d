"""
Deterministic writers: fixed float formatting, sorted keys and no timestamps,
so one config and seed always produce the same bytes.
"""

import csv
import json
import math
import os

import numpy as np
import yaml

from fastdiff import _program, __version__
from fastdiff.utils.config import *
from fastdiff.utils.dependency_checks import module_versions

# keys that depend on where the run was started, not on what it computed
LOCAL_KEYS = [KEY_CWD,KEY_INPUT_PATH,KEY_OUTDIR,KEY_COMMAND,KEY_VERBOSE,KEY_OVERWRITE]


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path, columns):
    """Write a dict of equally long columns, in insertion order."""
    names = list(columns)
    values = [np.asarray(columns[name]) for name in names]
    lengths = {len(v) for v in values}
    if len(lengths) > 1:
        raise ValueError(f"columns of different lengths for {path}: {sorted(lengths)}")
    with open(path, "w", newline="") as fw:
        writer = csv.writer(fw, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*values):
            writer.writerow([format_value(v) for v in row])


def to_plain(value):
    """Convert numpy scalars and arrays to JSON types; NaN and inf become null."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_json(path, data):
    with open(path, "w") as fw:
        json.dump(to_plain(data), fw, sort_keys=True, indent=2)
        fw.write("\n")


def run_config(config):
    return {key: to_plain(value) for key, value in config.items() if key not in LOCAL_KEYS}


def write_run_config(config, path):
    """Resolved configuration that reproduces the run when passed back with -c."""
    with open(path, "w") as fw:
        yaml.safe_dump(run_config(config), fw, sort_keys=True, default_flow_style=None)


def write_manifest(config, outdir, outputs):
    manifest = {
        "program": _program,
        "version": __version__,
        "command": config[KEY_COMMAND],
        "config": run_config(config),
        "dependencies": module_versions(module_list),
        "outputs": sorted(outputs),
    }
    write_json(os.path.join(outdir, "manifest.json"), manifest)
