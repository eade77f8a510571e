"""Binary file formats: CDM1 depth maps, PGM masks, PPM images and PLY point clouds.

CDM1 layout: ``b"CDM1"``, little-endian u32 width, u32 height, then
``width * height`` little-endian float32 depths row-major (NaN = background).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from canopyfit.errors import FormatError
from canopyfit.render.cloud import PointCloud

CDM_MAGIC = b"CDM1"
_CDM_HEADER = struct.Struct("<4sII")


def write_cdm(depth: np.ndarray, path: str | Path) -> None:
    depth = np.asarray(depth, dtype="<f4")
    if depth.ndim != 2:
        raise FormatError("depth map must be 2-D")
    h, w = depth.shape
    with open(path, "wb") as fh:
        fh.write(_CDM_HEADER.pack(CDM_MAGIC, w, h))
        fh.write(np.ascontiguousarray(depth).tobytes())


def read_cdm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != CDM_MAGIC:
        raise FormatError(f"{path}: bad magic bytes {data[:4]!r} at offset 0, expected {CDM_MAGIC!r}")
    if len(data) < _CDM_HEADER.size:
        raise FormatError(f"{path}: header truncated at offset {len(data)}")
    _, w, h = _CDM_HEADER.unpack_from(data)
    expected = _CDM_HEADER.size + 4 * w * h
    if len(data) != expected:
        raise FormatError(f"{path}: payload size mismatch at offset {_CDM_HEADER.size}: "
                          f"expected {expected} bytes in total, found {len(data)}")
    return np.frombuffer(data, dtype="<f4", offset=_CDM_HEADER.size).reshape(h, w).astype(np.float32)


def write_pgm(mask: np.ndarray, path: str | Path) -> None:
    mask = np.asarray(mask)
    h, w = mask.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.where(mask, 255, 0).astype(np.uint8).tobytes())


def write_ppm(rgb: np.ndarray, path: str | Path) -> None:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise FormatError("RGB image must have shape (height, width, 3)")
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.clip(rgb, 0, 255).astype(np.uint8).tobytes())


def _read_netpbm(path, magic: bytes, channels: int) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:2] != magic:
        raise FormatError(f"{path}: bad magic bytes {data[:2]!r} at offset 0, expected {magic!r}")
    tokens, pos = [], 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: header truncated at offset {pos}")
        try:
            tokens.append(int(data[start:pos]))
        except ValueError:
            raise FormatError(f"{path}: non-integer header field at offset {start}") from None
    pos += 1
    w, h, maxval = tokens
    if maxval > 255:
        raise FormatError(f"{path}: only 8-bit images supported (maxval {maxval})")
    size = w * h * channels
    if len(data) - pos != size:
        raise FormatError(f"{path}: expected {size} pixel bytes at offset {pos}, found {len(data) - pos}")
    img = np.frombuffer(data, dtype=np.uint8, offset=pos)
    return img.reshape(h, w) if channels == 1 else img.reshape(h, w, channels)


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary PGM; nonzero pixels are foreground."""
    return _read_netpbm(path, b"P5", 1) > 0


def read_ppm(path: str | Path) -> np.ndarray:
    """Read a binary 8-bit PPM as a ``(height, width, 3)`` uint8 array."""
    return _read_netpbm(path, b"P6", 3).copy()


_PLY_TYPES = {
    "char": "i1", "int8": "i1", "uchar": "u1", "uint8": "u1",
    "short": "<i2", "int16": "<i2", "ushort": "<u2", "uint16": "<u2",
    "int": "<i4", "int32": "<i4", "uint": "<u4", "uint32": "<u4",
    "float": "<f4", "float32": "<f4", "double": "<f8", "float64": "<f8",
}


def write_ply(cloud: PointCloud, path: str | Path) -> None:
    n = len(cloud)
    fields = [("x", "<f4"), ("y", "<f4"), ("z", "<f4")]
    header = ["ply", "format binary_little_endian 1.0", f"element vertex {n}",
              "property float x", "property float y", "property float z"]
    if cloud.colors is not None:
        fields += [("red", "u1"), ("green", "u1"), ("blue", "u1")]
        header += ["property uchar red", "property uchar green", "property uchar blue"]
    header.append("end_header")
    rec = np.empty(n, dtype=fields)
    rec["x"], rec["y"], rec["z"] = cloud.points.T
    if cloud.colors is not None:
        rec["red"], rec["green"], rec["blue"] = cloud.colors.T
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(rec.tobytes())


def read_ply(path: str | Path) -> PointCloud:
    """Read a binary little-endian PLY vertex element (extra properties ignored)."""
    data = Path(path).read_bytes()
    if not data.startswith(b"ply"):
        raise FormatError(f"{path}: bad magic bytes {data[:3]!r} at offset 0, expected b'ply'")
    end = data.find(b"end_header\n")
    if end < 0:
        raise FormatError(f"{path}: no end_header found")
    body = end + len(b"end_header\n")
    n, fields, in_vertex = None, [], False
    for line in data[:end].decode("ascii", "replace").splitlines()[1:]:
        parts = line.split()
        if not parts or parts[0] in ("comment", "obj_info"):
            continue
        if parts[0] == "format" and parts[1] != "binary_little_endian":
            raise FormatError(f"{path}: unsupported PLY format {parts[1]!r}")
        if parts[0] == "element":
            in_vertex = parts[1] == "vertex"
            if in_vertex:
                n = int(parts[2])
            elif n is None:
                raise FormatError(f"{path}: elements before 'vertex' are not supported")
        elif parts[0] == "property" and in_vertex:
            if parts[1] == "list":
                raise FormatError(f"{path}: list properties on vertices are not supported")
            if parts[1] not in _PLY_TYPES:
                raise FormatError(f"{path}: unknown property type {parts[1]!r}")
            fields.append((parts[2], _PLY_TYPES[parts[1]]))
    if n is None:
        raise FormatError(f"{path}: no vertex element")
    dtype = np.dtype(fields)
    if len(data) - body < n * dtype.itemsize:
        raise FormatError(f"{path}: vertex data truncated at offset {len(data)}")
    rec = np.frombuffer(data, dtype=dtype, count=n, offset=body)
    names = dtype.names
    for axis in "xyz":
        if axis not in names:
            raise FormatError(f"{path}: missing vertex property {axis!r}")
    points = np.column_stack([rec["x"], rec["y"], rec["z"]]).astype(np.float64)
    colors = None
    if all(c in names for c in ("red", "green", "blue")):
        colors = np.column_stack([rec["red"], rec["green"], rec["blue"]]).astype(np.uint8)
    return PointCloud(points, colors)
