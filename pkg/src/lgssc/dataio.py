"""Dataset loaders and result writers.

Gallery formats:

* CSV: first line is the header ``height,width``; each following line is
  one pixel row with N comma-separated values (samples are columns).
* UOSG binary: little-endian magic ``UOSG``, u32 version=1, u32 D, u32 N,
  u32 height, u32 width, D*N float64 column-major payload, then an optional
  u8 has_labels flag followed by N u32 labels.
* PGM directory: 8-bit binary PGM (P5) images, sorted lexicographically by
  filename; labels come from a sibling ``labels.csv`` with lines
  ``filename,label`` when present. Intensities are scaled to [0, 1].

Emitters write ``labels.csv`` (index,label), ``metrics.json`` (all floats
with 17 significant digits), ``embedding2d.csv`` (index,x,y,label) and
square coefficient matrices in the UOSG format.
"""

import json
import struct
from pathlib import Path

import numpy as np

from .datatypes import DataGallery, validate_gallery
from .errors import GeometryMismatch, ParseError

MAGIC = b"UOSG"
VERSION = 1


def load_gallery(path, format="auto") -> DataGallery:
    """Load a gallery from CSV, UOSG binary, or a directory of PGM images."""
    path = Path(path)
    if format == "auto":
        if path.is_dir():
            format = "pgm"
        else:
            with open(path, "rb") as f:
                format = "uosg" if f.read(4) == MAGIC else "csv"
    if format == "csv":
        return load_gallery_csv(path)
    if format == "uosg":
        return load_gallery_uosg(path)
    if format == "pgm":
        return load_gallery_pgm_dir(path)
    raise ValueError(f"unknown gallery format {format!r}")


def load_gallery_csv(path) -> DataGallery:
    with open(path, "r") as f:
        header = f.readline().strip()
        try:
            height, width = (int(tok) for tok in header.split(","))
        except ValueError as e:
            raise ParseError(f"{path}:1: header must be 'height,width', got {header!r}") from e
        rows = []
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as e:
                raise ParseError(f"{path}:{lineno}: {e}") from e
    if len(rows) != height * width:
        raise ParseError(
            f"{path}: expected {height * width} pixel rows for {height}x{width}, got {len(rows)}"
        )
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ParseError(f"{path}: ragged rows with lengths {sorted(widths)}")
    return validate_gallery(DataGallery(np.array(rows), height, width))


def save_gallery_csv(g: DataGallery, path):
    with open(path, "w") as f:
        f.write(f"{g.height},{g.width}\n")
        for row in g.data:
            f.write(",".join(_fmt_float(v) for v in row) + "\n")


def load_gallery_uosg(path) -> DataGallery:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise ParseError(f"{path}: byte 0: bad magic {raw[:4]!r}, expected {MAGIC!r}")
    if len(raw) < 24:
        raise ParseError(f"{path}: byte {len(raw)}: truncated header (need 24 bytes)")
    version, d, n, height, width = struct.unpack_from("<5I", raw, 4)
    if version != VERSION:
        raise ParseError(f"{path}: byte 4: unsupported version {version}")
    payload_end = 24 + 8 * d * n
    if len(raw) < payload_end:
        raise ParseError(
            f"{path}: byte {len(raw)}: payload for D*N = {d}*{n} needs {payload_end} bytes"
        )
    data = np.frombuffer(raw, dtype="<f8", count=d * n, offset=24).reshape((d, n), order="F")
    labels = None
    if len(raw) > payload_end:
        has_labels = raw[payload_end]
        if has_labels not in (0, 1):
            raise ParseError(f"{path}: byte {payload_end}: has_labels must be 0 or 1")
        if has_labels:
            need = payload_end + 1 + 4 * n
            if len(raw) < need:
                raise ParseError(f"{path}: byte {len(raw)}: truncated labels (need {need} bytes)")
            raw_labels = np.frombuffer(raw, dtype="<u4", count=n, offset=payload_end + 1)
            # arbitrary label ids are remapped to 0-based contiguous integers
            _, labels = np.unique(raw_labels, return_inverse=True)
    return validate_gallery(DataGallery(data, height, width, labels))


def save_gallery_uosg(g: DataGallery, path):
    d, n = g.data.shape
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<5I", VERSION, d, n, g.height, g.width))
        f.write(np.asarray(g.data, dtype="<f8").tobytes(order="F"))
        if g.labels is None:
            f.write(struct.pack("<B", 0))
        else:
            f.write(struct.pack("<B", 1))
            f.write(np.asarray(g.labels, dtype="<u4").tobytes())


def _read_pgm(path):
    raw = Path(path).read_bytes()
    pos = 0

    def token():
        nonlocal pos
        while pos < len(raw):
            if raw[pos : pos + 1].isspace():
                pos += 1
            elif raw[pos : pos + 1] == b"#":
                while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError(f"{path}: byte {start}: unexpected end of header")
        return raw[start:pos]

    if token() != b"P5":
        raise ParseError(f"{path}: byte 0: not a binary PGM (P5) file")
    try:
        width = int(token())
        height = int(token())
        maxval = int(token())
    except ValueError as e:
        raise ParseError(f"{path}: byte {pos}: bad header field: {e}") from e
    if not 0 < maxval < 256:
        raise ParseError(f"{path}: only 8-bit PGM supported, maxval = {maxval}")
    pos += 1  # single whitespace after maxval
    need = pos + height * width
    if len(raw) < need:
        raise ParseError(f"{path}: byte {len(raw)}: pixel data truncated (need {need} bytes)")
    pixels = np.frombuffer(raw, dtype=np.uint8, count=height * width, offset=pos)
    return pixels.reshape(height, width).astype(float) / maxval


def load_gallery_pgm_dir(path) -> DataGallery:
    path = Path(path)
    files = sorted(p for p in path.iterdir() if p.suffix.lower() == ".pgm")
    if not files:
        raise ParseError(f"{path}: no .pgm files found")
    images = []
    geometry = None
    for p in files:
        img = _read_pgm(p)
        if geometry is None:
            geometry = img.shape
        elif img.shape != geometry:
            raise GeometryMismatch(f"{p}: image is {img.shape}, expected {geometry}")
        images.append(img.ravel())
    labels = None
    labels_file = path / "labels.csv"
    if labels_file.exists():
        mapping = {}
        with open(labels_file) as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.lower().startswith("filename"):
                    continue
                try:
                    name, label = line.rsplit(",", 1)
                except ValueError as e:
                    raise ParseError(f"{labels_file}:{lineno}: expected 'filename,label'") from e
                mapping[name.strip()] = label.strip()
        try:
            symbols = [mapping[p.name] for p in files]
        except KeyError as e:
            raise ParseError(f"{labels_file}: no label for file {e.args[0]!r}") from e
        _, labels = np.unique(symbols, return_inverse=True)
    data = np.stack(images, axis=1)
    return validate_gallery(DataGallery(data, geometry[0], geometry[1], labels))


def _fmt_float(x):
    return format(float(x), ".17g")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)}")


def _render_json(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  {json.dumps(str(k))}: {_render_json(v, indent + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, float):
        if not np.isfinite(obj):
            raise ValueError("metrics JSON must not contain non-finite floats")
        return _fmt_float(obj)
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, np.floating):
        return _fmt_float(float(obj))
    return json.dumps(obj)


def write_metrics_json(payload, path):
    """Serialize the metrics document with 17-significant-digit floats."""
    Path(path).write_text(_render_json(payload) + "\n")


def write_labels_csv(labels, path):
    with open(path, "w") as f:
        f.write("index,label\n")
        for i, lab in enumerate(labels):
            f.write(f"{i},{int(lab)}\n")


def write_embedding_csv(points2d, labels, path):
    with open(path, "w") as f:
        f.write("index,x,y,label\n")
        for i, ((x, y), lab) in enumerate(zip(points2d, labels)):
            f.write(f"{i},{_fmt_float(x)},{_fmt_float(y)},{int(lab)}\n")


def save_matrix_uosg(M, path):
    """Store a square matrix in the gallery binary format (height=N, width=1)."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    g = DataGallery(M, n, 1)
    save_gallery_uosg(g, path)


def load_matrix_uosg(path):
    return load_gallery_uosg(path).data
