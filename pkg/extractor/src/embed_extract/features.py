"""Writer for the binary feature-table format.

Layout (little-endian): magic "BHFT", u16 version, u32 n_rows, u32 n_dims,
u32 n_classes, then n_rows x n_dims float32 row-major, then n_rows u32
labels. Kept independent of the consumer package on purpose; the format is
the contract.
"""

import struct

import numpy as np

MAGIC = b"BHFT"
VERSION = 1


def write_features(path, features: np.ndarray, labels: np.ndarray,
                   n_classes: int) -> None:
    features = np.ascontiguousarray(features, dtype="<f4")
    labels = np.ascontiguousarray(labels, dtype="<u4")
    if features.ndim != 2:
        raise ValueError("features must be a 2-D matrix")
    n, d = features.shape
    if labels.shape != (n,):
        raise ValueError("labels length must match the number of rows")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<HIII", VERSION, n, d, n_classes))
        f.write(features.tobytes(order="C"))
        f.write(labels.tobytes())
