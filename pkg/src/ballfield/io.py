"""CSV tables, run manifests and flat config files.

Floats are written with 17 significant digits so every value read back
is bit-identical to the one computed.
"""
import csv
import hashlib
import json
import os
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from . import __version__

MANIFEST_NAME = "manifest.json"


def fmt(value):
    """17-significant-digit text for floats, plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """(header, rows) with numeric fields converted to float."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for row in reader:
            out = []
            for v in row:
                try:
                    out.append(float(v))
                except ValueError:
                    out.append(v)
            rows.append(out)
    return header, rows


def parse_range(text):
    """'start:stop:step' -> floats from start to stop inclusive; a bare number is one value.

    Decimal arithmetic keeps 0.1:1:0.1 at exactly 0.1, 0.2, ..., 1.0.
    """
    try:
        parts = [Decimal(p) for p in str(text).split(":")]
    except InvalidOperation:
        raise ValueError(f"not a number or start:stop:step range: {text!r}") from None
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = parts
    if step <= 0 or stop < start:
        raise ValueError(f"range needs step > 0 and stop >= start, got {text!r}")
    count = int((stop - start) / step) + 1
    return [float(start + k * step) for k in range(count)]


def parse_points(text):
    """Points as 'x,y,z;x,y,z;...' or the path of a CSV file with x, y, z columns."""
    path = Path(text)
    if path.is_file():
        header, rows = read_csv(path)
        cols = [header.index(c) for c in ("x", "y", "z")]
        return np.array([[row[c] for c in cols] for row in rows], dtype=float)
    pts = []
    for chunk in str(text).split(";"):
        if chunk.strip():
            vals = [float(v) for v in chunk.split(",")]
            if len(vals) != 3:
                raise ValueError(f"point needs three coordinates: {chunk!r}")
            pts.append(vals)
    if not pts:
        raise ValueError("no points given")
    return np.array(pts)


def read_config(path):
    """Flat key=value file; blank lines and '#' comments are ignored."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """Everything needed to redo a run: the resolved argument list plus output digests.

    Data files are hashed.  Figures and timing reports are listed under
    ``unhashed`` since their bytes depend on the matplotlib build or the clock.
    """
    command: str
    model: str
    params: dict
    argv: list
    seed: int = None
    outputs: dict = field(default_factory=dict)
    unhashed: list = field(default_factory=list)
    timestamp: str = ""
    version: str = __version__
    environment: dict = field(default_factory=dict)

    def add_output(self, path):
        path = Path(path)
        self.outputs[path.name] = sha256(path)

    def write(self, out_dir):
        self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        self.environment = {"python": platform.python_version(), "numpy": np.__version__}
        path = Path(out_dir) / MANIFEST_NAME
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def read(cls, path):
        obj = json.loads(Path(path).read_text())
        return cls(**obj)


def ensure_dir(path):
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    return path
