"""Binary file containers: features (BHFT), parameter vectors (BHPV),
sample chains (BHSC), and Gaussian posteriors (BHGP).

All containers are little-endian and start with a 4-byte magic followed by a
u16 format version. Layout entries (named tensor views into a flat vector)
are encoded as: u16 name length, UTF-8 name, u8 ndim, ndim u32 dims,
u64 flat offset.
"""

from __future__ import annotations

import struct

import numpy as np

VERSION = 1

MAGIC_FEATURES = b"BHFT"
MAGIC_PARAMS = b"BHPV"
MAGIC_CHAIN = b"BHSC"
MAGIC_GAUSSIAN = b"BHGP"


class ContainerError(ValueError):
    """Raised on malformed or truncated container files."""


class _Reader:
    def __init__(self, buf: bytes, path: str):
        self.buf = buf
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise ContainerError(
                f"{self.path}: truncated file (needed {n} bytes at offset {self.pos})"
            )
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack("<" + fmt, self.take(struct.calcsize("<" + fmt)))

    def array(self, dtype: str, count: int) -> np.ndarray:
        dt = np.dtype(dtype)
        raw = self.take(dt.itemsize * count)
        return np.frombuffer(raw, dtype=dt).copy()

    def done(self) -> None:
        if self.pos != len(self.buf):
            raise ContainerError(
                f"{self.path}: {len(self.buf) - self.pos} trailing bytes"
            )


def _open_reader(path, magic: bytes) -> _Reader:
    with open(path, "rb") as f:
        buf = f.read()
    if len(buf) == 0:
        raise ContainerError(f"{path}: empty file")
    r = _Reader(buf, str(path))
    got = r.take(4)
    if got != magic:
        raise ContainerError(f"{path}: bad magic {got!r}, expected {magic!r}")
    (version,) = r.unpack("H")
    if version != VERSION:
        raise ContainerError(f"{path}: unsupported version {version}")
    return r


def _encode_layout(layout) -> bytes:
    layout = layout or []
    parts = [struct.pack("<I", len(layout))]
    for name, shape, offset in layout:
        raw = name.encode("utf-8")
        parts.append(struct.pack("<H", len(raw)))
        parts.append(raw)
        parts.append(struct.pack("<B", len(shape)))
        parts.append(struct.pack("<%dI" % len(shape), *shape))
        parts.append(struct.pack("<Q", offset))
    return b"".join(parts)


def _decode_layout(r: _Reader):
    (n_entries,) = r.unpack("I")
    layout = []
    for _ in range(n_entries):
        (name_len,) = r.unpack("H")
        name = r.take(name_len).decode("utf-8")
        (ndim,) = r.unpack("B")
        shape = tuple(r.unpack("%dI" % ndim)) if ndim else ()
        (offset,) = r.unpack("Q")
        layout.append((name, shape, int(offset)))
    return layout


def write_features(path, features: np.ndarray, labels: np.ndarray, n_classes: int) -> None:
    """Write an N x D float32 feature matrix plus u32 labels. Bit-exact."""
    features = np.ascontiguousarray(features, dtype="<f4")
    labels = np.ascontiguousarray(labels, dtype="<u4")
    n, d = features.shape
    with open(path, "wb") as f:
        f.write(MAGIC_FEATURES)
        f.write(struct.pack("<HIII", VERSION, n, d, n_classes))
        f.write(features.tobytes(order="C"))
        f.write(labels.tobytes())


def read_features(path):
    """Read a BHFT file. Returns (features float64, labels int64, n_classes)."""
    r = _open_reader(path, MAGIC_FEATURES)
    n, d, c = r.unpack("III")
    feats = r.array("<f4", n * d).reshape(n, d).astype(np.float64)
    labels = r.array("<u4", n).astype(np.int64)
    r.done()
    return feats, labels, int(c)


def write_params(path, values: np.ndarray, layout) -> None:
    values = np.ascontiguousarray(values, dtype="<f8")
    with open(path, "wb") as f:
        f.write(MAGIC_PARAMS)
        f.write(struct.pack("<HI", VERSION, values.size))
        f.write(_encode_layout(layout))
        f.write(values.tobytes())


def read_params(path):
    r = _open_reader(path, MAGIC_PARAMS)
    (p,) = r.unpack("I")
    layout = _decode_layout(r)
    values = r.array("<f8", p)
    r.done()
    return values, layout


def write_chain(path, draws: np.ndarray, accept_stats: np.ndarray,
                divergences: int, step_size_final: float, seed: int,
                layout=None) -> None:
    draws = np.ascontiguousarray(draws, dtype="<f8")
    accept_stats = np.ascontiguousarray(accept_stats, dtype="<f8")
    s, p = draws.shape
    with open(path, "wb") as f:
        f.write(MAGIC_CHAIN)
        f.write(struct.pack("<HIIQdI", VERSION, s, p, seed, step_size_final,
                            divergences))
        f.write(_encode_layout(layout or []))
        f.write(draws.tobytes(order="C"))
        f.write(accept_stats.tobytes())


def read_chain(path):
    r = _open_reader(path, MAGIC_CHAIN)
    s, p, seed, step_size, divergences = r.unpack("IIQdI")
    layout = _decode_layout(r)
    draws = r.array("<f8", s * p).reshape(s, p)
    accept_stats = r.array("<f8", s)
    r.done()
    return {
        "draws": draws,
        "accept_stats": accept_stats,
        "divergences": int(divergences),
        "step_size_final": float(step_size),
        "seed": int(seed),
        "layout": layout or None,
    }


def write_gaussian(path, mean: np.ndarray, variance: np.ndarray, layout) -> None:
    mean = np.ascontiguousarray(mean, dtype="<f8")
    variance = np.ascontiguousarray(variance, dtype="<f8")
    with open(path, "wb") as f:
        f.write(MAGIC_GAUSSIAN)
        f.write(struct.pack("<HI", VERSION, mean.size))
        f.write(_encode_layout(layout))
        f.write(mean.tobytes())
        f.write(variance.tobytes())


def read_gaussian(path):
    r = _open_reader(path, MAGIC_GAUSSIAN)
    (p,) = r.unpack("I")
    layout = _decode_layout(r)
    mean = r.array("<f8", p)
    variance = r.array("<f8", p)
    r.done()
    return mean, variance, layout
