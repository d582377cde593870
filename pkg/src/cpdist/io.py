"""JSON / CSV helpers. Complex numbers travel as ``[re, im]`` pairs."""
import csv
import json

import numpy as np


def complex_to_json(a):
    a = np.asarray(a, dtype=np.complex128)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def complex_from_json(obj):
    """Inverse of :func:`complex_to_json`; bare real numbers are accepted too."""
    a = np.asarray(obj, dtype=float)
    if a.ndim >= 1 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a.astype(np.complex128)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_text(text, path=None, stream=None):
    if path is None:
        stream.write(text)
        if not text.endswith("\n"):
            stream.write("\n")
        return
    with open(path, "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def read_vectors(path):
    """Vector-list JSON: either a list of vectors or ``{"vectors": [...]}``."""
    obj = read_json(path)
    if isinstance(obj, dict):
        obj = obj["vectors"]
    return [complex_from_json(v) for v in obj]


def read_points_csv(path):
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            row = [c.strip() for c in row if c.strip()]
            if not row or row[0].startswith("#"):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                # tolerate a header line
                if rows:
                    raise
    if len({len(r) for r in rows}) > 1:
        raise ValueError("point-cloud rows have different lengths")
    return np.array(rows, dtype=float)


def rows_to_csv(header, rows):
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v
