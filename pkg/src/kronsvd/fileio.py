"""Plain-text and Netpbm I/O.

CSV matrices hold one row per line, comma separated, with every float written
as its shortest round-trip ``repr`` so that save/load is bit exact. PGM images
(P2 ascii or P5 binary, maxval up to 65535) are mapped linearly to ``[0, 1]``.
"""

import os
import tempfile
from pathlib import Path

import numpy as np

from .exceptions import ParseError

__all__ = [
    "atomic_write_text",
    "atomic_write_bytes",
    "format_float",
    "write_csv_matrix",
    "read_csv_matrix",
    "write_csv_table",
    "read_pgm",
    "write_pgm",
    "load_image",
    "save_image",
]


def _atomic_write(path, data, mode):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    _atomic_write(path, text.encode("utf-8"), "wb")


def atomic_write_bytes(path, data):
    _atomic_write(path, data, "wb")


def format_float(x):
    x = float(x)
    if x == 0.0:
        # keep the sign of negative zero out of the files
        return "0.0"
    return repr(x)


def _format_cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format_float(x)


def write_csv_matrix(path, m):
    m = np.asarray(m)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ValueError(f"expected a 1-D or 2-D array, got shape {m.shape}")
    if np.issubdtype(m.dtype, np.integer):
        lines = [",".join(str(int(v)) for v in row) for row in m]
    else:
        lines = [",".join(format_float(v) for v in row) for row in m]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_csv_table(path, header, rows):
    """CSV with a header line; floats use the round-trip format."""
    lines = [",".join(header)]
    lines += [",".join(_format_cell(v) for v in row) for row in rows]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_csv_matrix(path, dtype=np.float64):
    path = Path(path)
    conv = float if np.issubdtype(dtype, np.floating) else int
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            try:
                row = [conv(c) for c in cells]
            except ValueError as exc:
                raise ParseError(f"bad number in {line!r}", path=path, line=lineno) from exc
            if rows and len(row) != len(rows[0]):
                raise ParseError(
                    f"expected {len(rows[0])} columns, found {len(row)}", path=path, line=lineno
                )
            rows.append(row)
    if not rows:
        raise ParseError("no data rows", path=path)
    return np.array(rows, dtype=dtype)


def _pgm_tokens(data, count, path):
    """Yield ``count`` header tokens as ``(token, line, offset)``; return data start."""
    tokens = []
    pos = 0
    line = 1
    size = len(data)
    while len(tokens) < count:
        if pos >= size:
            raise ParseError("truncated header", path=path, line=line, offset=pos)
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < size and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if c.isspace():
            if c == b"\n":
                line += 1
            pos += 1
            continue
        start = pos
        while pos < size and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append((data[start:pos].decode("ascii", "replace"), line, start))
    return tokens, pos, line


def read_pgm(path):
    """Read a P2 or P5 PGM file; returns ``(array in [0, 1], maxval)``."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] not in (b"P2", b"P5"):
        raise ParseError(f"not a PGM file (magic {data[:2]!r})", path=path, line=1, offset=0)
    magic = data[:2].decode()
    tokens, pos, line = _pgm_tokens(data, 4, path)
    fields = []
    for tok, ln, off in tokens[1:]:
        if not tok.isdigit():
            raise ParseError(f"expected an integer, found {tok!r}", path=path, line=ln, offset=off)
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ParseError(f"bad size {width}x{height}", path=path, line=tokens[1][1])
    if not 1 <= maxval <= 65535:
        raise ParseError(f"maxval {maxval} out of range", path=path, line=tokens[3][1])
    count = width * height
    if magic == "P5":
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            raise ParseError("missing whitespace after maxval", path=path, offset=pos)
        pos += 1
        dt = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dt.itemsize
        if len(data) - pos < need:
            raise ParseError(
                f"raster needs {need} bytes, only {len(data) - pos} present", path=path, offset=pos
            )
        values = np.frombuffer(data, dtype=dt, count=count, offset=pos).astype(np.int64)
    else:
        values = []
        text = data[pos:].decode("ascii", "replace")
        for offset_line, raw in enumerate(text.split("\n")):
            raw = raw.split("#", 1)[0]
            for tok in raw.split():
                if not tok.isdigit():
                    raise ParseError(
                        f"expected a pixel value, found {tok!r}", path=path, line=line + offset_line
                    )
                values.append(int(tok))
        if len(values) < count:
            raise ParseError(f"expected {count} pixels, found {len(values)}", path=path)
        values = np.array(values[:count], dtype=np.int64)
    if np.any(values > maxval):
        raise ParseError(f"pixel value exceeds maxval {maxval}", path=path)
    return values.reshape(height, width) / float(maxval), maxval


def write_pgm(path, image, maxval=255, plain=False):
    """Write ``image`` (values in ``[0, 1]``, clipped) as P5, or P2 if ``plain``."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {img.shape}")
    if not 1 <= maxval <= 65535:
        raise ValueError(f"maxval must be in [1, 65535], got {maxval}")
    q = np.rint(np.clip(img, 0.0, 1.0) * maxval).astype(np.int64)
    h, w = q.shape
    if plain:
        body = "\n".join(" ".join(str(v) for v in row) for row in q)
        atomic_write_text(path, f"P2\n{w} {h}\n{maxval}\n{body}\n")
    else:
        dt = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        atomic_write_bytes(path, f"P5\n{w} {h}\n{maxval}\n".encode("ascii") + q.astype(dt).tobytes())


def _image_format(path, fmt):
    if fmt is not None:
        return fmt.lower()
    suffix = Path(path).suffix.lower()
    if suffix in (".pgm", ".pnm"):
        return "pgm"
    if suffix in (".csv", ".txt"):
        return "csv"
    raise ValueError(f"cannot infer image format from {path!r}; pass fmt='pgm' or 'csv'")


def load_image(path, fmt=None):
    fmt = _image_format(path, fmt)
    if fmt == "pgm":
        return read_pgm(path)[0]
    if fmt == "csv":
        return read_csv_matrix(path)
    raise ValueError(f"unknown image format {fmt!r}")


def save_image(path, image, fmt=None, **kwargs):
    fmt = _image_format(path, fmt)
    if fmt == "pgm":
        write_pgm(path, image, **kwargs)
    elif fmt == "csv":
        write_csv_matrix(path, image)
    else:
        raise ValueError(f"unknown image format {fmt!r}")
