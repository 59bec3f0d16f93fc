"""Datasets, Gaussian-kernel similarity, and the symmetric similarity matrix.

The binary matrix file format is: magic ``HCSIM1`` (6 bytes), unsigned
little-endian 32-bit n, then n(n-1)/2 little-endian float64 values for the
strict upper triangle in row-major order.
"""

from __future__ import annotations

import struct

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import (DataIOError, DegenerateInputError, InputError,
                     MatrixFormatError)

MAGIC = b"HCSIM1"
AUTO = "auto"


class Dataset:
    """A plain feature table: n rows by d columns, optionally row-labeled."""

    def __init__(self, features, row_labels=None):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] < 1:
            raise InputError("dataset must be a 2-D table with d >= 1 columns")
        self.features = features
        self.row_labels = row_labels

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    def zscored(self):
        """Copy with each column standardized; constant columns are left as 0."""
        x = self.features
        mu = x.mean(axis=0)
        sd = x.std(axis=0)
        sd[sd == 0] = 1.0
        return Dataset((x - mu) / sd, self.row_labels)


def load_dataset(path, delimiter=",", header=False, label_column=None):
    """Read a delimited numeric text file into a Dataset.

    ``delimiter=None`` splits on any whitespace. ``label_column`` names a
    0-based column to drop (kept as row labels). Non-numeric cells and ragged
    rows are rejected with their 1-based row/column position.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataIOError(f"cannot read dataset {path}: {exc}") from exc

    rows, labels = [], []
    width = None
    header_pending = bool(header)
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        if header_pending:
            header_pending = False
            continue
        cells = raw.split(delimiter) if delimiter else raw.split()
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise InputError(
                f"ragged row {lineno}: expected {width} cells, got {len(cells)}")
        values = []
        for col, cell in enumerate(cells):
            if label_column is not None and col == label_column:
                labels.append(cell.strip())
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise InputError(
                    f"non-numeric cell at row {lineno}, column {col + 1}: "
                    f"{cell.strip()!r}") from None
        rows.append(values)
    if not rows:
        raise InputError(f"dataset {path} contains no data rows")
    return Dataset(np.array(rows, dtype=np.float64),
                   labels if label_column is not None else None)


class SimilarityMatrix:
    """Symmetric nonnegative n-by-n pairwise similarity table.

    The diagonal is unused and stored as zero. ``total_weight`` caches the sum
    over unordered pairs. Instances are treated as immutable once built; one
    matrix may back many concurrent searches.

    Entries are float64 in normal use. A matrix of ``fractions.Fraction``
    entries (object dtype) is also accepted and switches downstream search to
    exact arithmetic.
    """

    def __init__(self, values):
        values = np.asarray(values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise InputError("similarity matrix must be square")
        if values.dtype != object:
            values = values.astype(np.float64, copy=True)
        else:
            values = values.copy()
        n = values.shape[0]
        if n < 2:
            raise InputError(f"similarity matrix needs n >= 2, got n={n}")
        np.fill_diagonal(values, values[0, 0] * 0)
        if not (values == values.T).all():
            raise InputError("similarity matrix must be symmetric")
        if (values < values[0, 0] * 0).any():
            raise InputError("similarity weights must be nonnegative")
        self.values = values
        iu = np.triu_indices(n, k=1)
        self.total_weight = values[iu].sum()

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def is_exact(self):
        return self.values.dtype == object


def gaussian_similarity(data, sigma=AUTO):
    """exp(-dist^2 / (2 sigma^2)) over all row pairs of ``data``.

    With ``sigma="auto"`` the bandwidth is the total pairwise Euclidean
    distance averaged over the n(n-1) ordered pairs, i.e. half the mean
    unordered pairwise distance. This is the convention that reproduces the
    reference experiment tables; pass an explicit sigma for anything else.
    """
    if data.n < 2:
        raise InputError(f"kernel needs at least 2 points, got {data.n}")
    dists = pdist(data.features)
    if sigma == AUTO:
        sigma = float(dists.sum()) / (data.n * (data.n - 1))
        if sigma == 0.0:
            raise DegenerateInputError(
                "all points identical: auto sigma is 0")
    else:
        sigma = float(sigma)
        if sigma <= 0.0:
            raise InputError(f"sigma must be positive, got {sigma}")
    w = squareform(np.exp(-(dists ** 2) / (2.0 * sigma * sigma)))
    return SimilarityMatrix(w), sigma


def save_matrix(matrix, path):
    """Write the binary HCSIM1 format (float matrices only)."""
    if matrix.is_exact:
        raise InputError("exact-arithmetic matrices have no binary form")
    n = matrix.n
    iu = np.triu_indices(n, k=1)
    tri = matrix.values[iu].astype("<f8")
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", n))
            fh.write(tri.tobytes())
    except OSError as exc:
        raise DataIOError(f"cannot write matrix {path}: {exc}") from exc


def load_matrix(path):
    """Read the binary HCSIM1 format back into a SimilarityMatrix."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise DataIOError(f"cannot read matrix {path}: {exc}") from exc
    if blob[: len(MAGIC)] != MAGIC:
        raise MatrixFormatError(f"{path}: bad magic bytes")
    if len(blob) < len(MAGIC) + 4:
        raise MatrixFormatError(f"{path}: truncated header")
    (n,) = struct.unpack_from("<I", blob, len(MAGIC))
    if n < 2:
        raise MatrixFormatError(f"{path}: invalid size n={n}")
    expected = len(MAGIC) + 4 + 8 * (n * (n - 1) // 2)
    if len(blob) != expected:
        raise MatrixFormatError(
            f"{path}: expected {expected} bytes for n={n}, found {len(blob)}")
    tri = np.frombuffer(blob, dtype="<f8", offset=len(MAGIC) + 4)
    values = np.zeros((n, n), dtype=np.float64)
    iu = np.triu_indices(n, k=1)
    values[iu] = tri
    values += values.T
    return SimilarityMatrix(values)
