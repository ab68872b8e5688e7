"""JSON and CSV readers/writers for pulses, profiles and scattering data."""

import csv
import json
from pathlib import Path

import numpy as np

from .pulse import HardPulse, MagnetizationProfile


def dump_json(obj, path):
    """Deterministic JSON (sorted keys, repr floats) so repeated runs are byte-identical."""
    text = json.dumps(_plain(obj), sort_keys=True, indent=2)
    Path(path).write_text(text + "\n")


def load_json(path):
    return json.loads(Path(path).read_text())


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    return x


def write_pulse_csv(p, path):
    """Columns t, re, im (one row per stored impulse; a single zero row for the zero pulse)."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "re", "im"])
        if len(p) == 0:
            wr.writerow([repr(0.0), repr(0.0), repr(0.0)])
        for t, om in zip(p.times, p.omegas):
            wr.writerow([repr(float(t)), repr(float(om.real)), repr(float(om.imag))])


def read_pulse_csv(path, delta):
    rows = list(csv.DictReader(open(path)))
    t = np.array([float(r["t"]) for r in rows])
    om = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
    start = int(round(t[0] / delta)) if len(t) else 0
    return HardPulse(delta, start, om)


def write_profile_csv(prof, path):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["z", "Mx", "My", "Mz"])
        for z, v in zip(prof.freqs, prof.vecs):
            wr.writerow([repr(float(z))] + [repr(float(x)) for x in v])


def read_profile_csv(path):
    rows = list(csv.DictReader(open(path)))
    z = [float(r["z"]) for r in rows]
    v = [[float(r["Mx"]), float(r["My"]), float(r["Mz"])] for r in rows]
    return MagnetizationProfile(z, v)


def emit_plot_data(p, prof, out):
    """pulse.csv and profile.csv in the directory out."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_pulse_csv(p, out / "pulse.csv")
    write_profile_csv(prof, out / "profile.csv")
    return out / "pulse.csv", out / "profile.csv"
