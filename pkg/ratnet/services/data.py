"""
Dataset ingestion, normalization, PCA feature reduction, synthetic data and batching.
"""

import csv
import gzip
import logging
import math
import struct
from pathlib import Path
from typing import IO, Iterator, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ..exceptions import (
    DataError,
    DimensionMismatchError,
    EmptyDatasetError,
    IdxDimensionError,
    IdxMagicError,
    IdxTruncatedError,
)
from ..utils.diffcore import Rng, as_matrix, gaussian_array, permutation, seeded_rng

logger = logging.getLogger(__name__)

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


class Dataset(BaseModel):
    """Feature matrix with integer labels. Treat as immutable once built."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    features: np.ndarray
    labels: np.ndarray
    name: str = "dataset"
    extractor: str = "raw"

    @model_validator(mode="after")
    def _check_rows(self) -> "Dataset":
        if self.features.ndim != 2:
            raise ValueError(f"Features must be 2-d, got shape {self.features.shape}")
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError(f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels")
        return self

    def __len__(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1 if len(self) else 0

    def subset(self, index: np.ndarray, name: Optional[str] = None) -> "Dataset":
        return Dataset(
            features=np.ascontiguousarray(self.features[index]),
            labels=np.ascontiguousarray(self.labels[index]),
            name=name or self.name,
            extractor=self.extractor,
        )

    def with_features(self, features: np.ndarray, extractor: Optional[str] = None) -> "Dataset":
        return Dataset(features=features, labels=self.labels, name=self.name, extractor=extractor or self.extractor)


def make_dataset(features, labels, name: str = "dataset", extractor: str = "raw") -> Dataset:
    try:
        return Dataset(
            features=as_matrix(features, name="features"),
            labels=np.ascontiguousarray(labels, dtype=np.int64).ravel(),
            name=name,
            extractor=extractor,
        )
    except ValueError as e:
        if isinstance(e, DataError):
            raise
        raise DimensionMismatchError(str(e))


# IDX

def _open_binary(path: Union[str, Path]) -> IO[bytes]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"File not found: {path}")
    return gzip.open(path, "rb") if path.suffix == ".gz" else open(path, "rb")


def _read_idx(path: Union[str, Path], magic: int, ndim: int) -> Tuple[Tuple[int, ...], bytes]:
    with _open_binary(path) as f:
        raw = f.read()
    if len(raw) < 4:
        raise IdxTruncatedError(f"{path}: file too short for an IDX header ({len(raw)} bytes)")
    (found,) = struct.unpack(">I", raw[:4])
    if found != magic:
        raise IdxMagicError(f"{path}: magic number 0x{found:08X}, expected 0x{magic:08X}")
    header_size = 4 + 4 * ndim
    if len(raw) < header_size:
        raise IdxTruncatedError(f"{path}: header announces {ndim} dimensions but file has {len(raw)} bytes")
    dims = struct.unpack(">" + "I" * ndim, raw[4:header_size])
    expected = int(np.prod(dims, dtype=np.int64))
    payload = raw[header_size:]
    if len(payload) < expected:
        raise IdxTruncatedError(f"{path}: expected {expected} data bytes for dims {dims}, found {len(payload)}")
    if len(payload) > expected:
        raise IdxDimensionError(f"{path}: {len(payload) - expected} bytes beyond the announced dims {dims}")
    return dims, payload


def load_idx_images(path: Union[str, Path]) -> np.ndarray:
    """Read an IDX image file into an (N, rows*cols) matrix scaled to [0, 1]."""
    (count, rows, cols), payload = _read_idx(path, IDX_IMAGES_MAGIC, 3)
    images = np.frombuffer(payload, dtype=np.uint8).reshape(count, rows * cols)
    logger.info(f"Loaded {count} images of {rows}x{cols} from {path}")
    return images.astype(np.float64) / 255.0


def load_idx_labels(path: Union[str, Path]) -> np.ndarray:
    (count,), payload = _read_idx(path, IDX_LABELS_MAGIC, 1)
    logger.info(f"Loaded {count} labels from {path}")
    return np.frombuffer(payload, dtype=np.uint8).astype(np.int64)


def load_mnist(images_path: Union[str, Path], labels_path: Union[str, Path], name: str = "mnist") -> Dataset:
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise IdxDimensionError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    return make_dataset(images, labels, name=name, extractor="pixels")


def write_idx(path: Union[str, Path], array: np.ndarray, magic: int) -> None:
    """Write a uint8 array as an IDX file."""
    array = np.ascontiguousarray(array, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">I", magic))
        f.write(struct.pack(">" + "I" * array.ndim, *array.shape))
        f.write(array.tobytes())


# CSV

def _parse_float(cell: str, row: int, col: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DataError(f"Non-numeric cell {cell!r} at row {row}, column {col}")


def load_csv_features(
    path: Union[str, Path],
    label_column: str = "label",
    has_header: bool = True,
    name: Optional[str] = None,
    extractor: str = "csv",
) -> Dataset:
    """
    Read a numeric CSV with one integer label column.

    Args:
        path: CSV file
        label_column: Header name of the label column, or its 0-based index when has_header is false
        has_header: Whether the first row holds column names
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"File not found: {path}")
    try:
        with open(path, newline="", encoding="utf-8") as f:
            rows: List[List[str]] = [row for row in csv.reader(f) if row]
    except UnicodeDecodeError as e:
        raise DataError(f"{path}: not a UTF-8 text file (byte {e.start})") from e
    if not rows:
        raise EmptyDatasetError(f"{path}: no data rows")
    if has_header:
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
        if label_column not in header:
            raise DataError(f"{path}: label column '{label_column}' not found in header {header}")
        label_index = header.index(label_column)
        width = len(header)
    else:
        try:
            label_index = int(label_column)
        except ValueError:
            raise DataError(f"{path}: without a header the label column must be an index, got '{label_column}'")
        width = len(rows[0])
        if not 0 <= label_index < width:
            raise DataError(f"{path}: label column index {label_index} out of range for {width} columns")
    if not rows:
        raise EmptyDatasetError(f"{path}: no data rows")

    features = np.empty((len(rows), width - 1))
    labels = np.empty(len(rows), dtype=np.int64)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {r} has {len(row)} cells, expected {width}")
        values = [_parse_float(cell, r, c) for c, cell in enumerate(row)]
        label = values.pop(label_index)
        if not float(label).is_integer():
            raise DataError(f"{path}: label {label!r} at row {r} is not an integer")
        labels[r] = int(label)
        features[r] = values
    logger.info(f"Loaded {len(rows)} rows with {width - 1} features from {path}")
    return make_dataset(features, labels, name=name or path.stem, extractor=extractor)


def write_csv_features(dataset: Dataset, path: Union[str, Path], label_column: str = "label") -> None:
    """Write features (17 significant digits) and labels with a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([f"f{j}" for j in range(dataset.dim)] + [label_column])
        for row, label in zip(dataset.features, dataset.labels):
            writer.writerow([f"{value:.17g}" for value in row] + [int(label)])


# Min-max normalization

class MinMaxScaler(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    minimum: np.ndarray
    maximum: np.ndarray


def minmax_fit(X: np.ndarray) -> MinMaxScaler:
    X = as_matrix(X, name="fit set")
    if X.shape[0] == 0:
        raise EmptyDatasetError("Min-max scaler needs a non-empty fit set")
    return MinMaxScaler(minimum=X.min(axis=0), maximum=X.max(axis=0))


def minmax_apply(scaler: MinMaxScaler, X: np.ndarray) -> np.ndarray:
    """(x - min) / (max - min) per column; constant columns map to 0. No clipping."""
    X = as_matrix(X, cols=scaler.minimum.shape[0], name="features")
    span = scaler.maximum - scaler.minimum
    constant = span == 0.0
    scaled = (X - scaler.minimum) / np.where(constant, 1.0, span)
    scaled[:, constant] = 0.0
    return scaled


# PCA

class PcaModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    total_variance: float

    @property
    def k(self) -> int:
        return int(self.components.shape[0])

    @property
    def explained_variance_ratio(self) -> float:
        if self.total_variance <= 0.0:
            return 1.0
        return float(self.eigenvalues.sum() / self.total_variance)


def _orthonormalize(Q: np.ndarray, locked: np.ndarray) -> np.ndarray:
    if locked.shape[1]:
        Q = Q - locked @ (locked.T @ Q)
    Q, _ = np.linalg.qr(Q)
    return Q


def _top_eigenvectors(C: np.ndarray, k: int, tol: float, max_iter: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Leading k eigenpairs of a symmetric PSD matrix by block orthogonal iteration.

    Ritz vectors whose residual drops below tol (relative to the largest eigenvalue) are
    locked and deflated out of the active block, leading ones first.
    """
    d = C.shape[0]
    scale = max(float(np.abs(np.diag(C)).max(initial=0.0)), np.finfo(float).tiny)
    locked = np.zeros((d, 0))
    locked_values: List[float] = []
    block = min(d, k + 8)
    active = _orthonormalize(gaussian_array(seeded_rng(seed), (d, block)), locked)

    for iteration in range(max_iter):
        active = _orthonormalize(C @ active, locked)
        T = active.T @ C @ active
        theta, W = np.linalg.eigh(0.5 * (T + T.T))
        order = np.argsort(theta)[::-1]
        theta, active = theta[order], active @ W[:, order]

        residual = np.linalg.norm(C @ active - active * theta, axis=0)
        n_new = 0
        while n_new < active.shape[1] and len(locked_values) + n_new < k and residual[n_new] <= tol * scale:
            n_new += 1
        if n_new:
            locked = np.hstack([locked, active[:, :n_new]])
            locked_values.extend(float(t) for t in theta[:n_new])
            remaining = d - locked.shape[1]
            active = active[:, n_new:]
            if len(locked_values) >= k:
                break
            if active.shape[1] > remaining:
                active = active[:, :remaining]
        if active.shape[1] == 0:
            break
    else:
        missing = k - len(locked_values)
        logger.warning(f"PCA orthogonal iteration stopped after {max_iter} iterations with {missing} unconverged components")
        locked = np.hstack([locked, active[:, :missing]])
        locked_values.extend(float(t) for t in theta[:missing])

    return np.array(locked_values[:k]), locked[:, :k]


def pca_fit(X: np.ndarray, k: int, tol: float = 1e-10, max_iter: int = 20000, seed: int = 0) -> PcaModel:
    """
    Principal components of X (rows are samples).

    Each component is oriented so that its largest-magnitude entry is positive.
    """
    X = as_matrix(X, name="PCA fit set")
    n, d = X.shape
    if k > d:
        raise DimensionMismatchError(f"Cannot extract {k} components from {d}-dimensional data")
    if k < 1:
        raise DimensionMismatchError(f"Number of components must be at least 1, got {k}")
    if n < 2:
        raise EmptyDatasetError(f"PCA needs at least 2 samples, got {n}")
    mean = X.mean(axis=0)
    Xc = X - mean
    C = (Xc.T @ Xc) / (n - 1)
    eigenvalues, vectors = _top_eigenvectors(C, k, tol, max_iter, seed)
    components = vectors.T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    logger.info(f"PCA kept {k} of {d} dimensions, explained variance {eigenvalues.sum() / max(np.trace(C), 1e-300):.4f}")
    return PcaModel(mean=mean, components=components, eigenvalues=eigenvalues, total_variance=float(np.trace(C)))


def pca_apply(model: PcaModel, X: np.ndarray) -> np.ndarray:
    X = as_matrix(X, cols=model.mean.shape[0], name="features")
    return (X - model.mean) @ model.components.T


# Synthetic data and batching

def gen_blobs(n_classes: int, per_class: int, spread: float, rng: Rng) -> Dataset:
    """Gaussian blobs around class centers evenly spaced on the unit circle in 2-d."""
    if n_classes < 2:
        raise DataError(f"Blobs need at least 2 classes, got {n_classes}")
    if spread < 0:
        raise DataError(f"Spread must be non-negative, got {spread}")
    angles = 2.0 * math.pi * np.arange(n_classes) / n_classes
    centers = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    labels = np.repeat(np.arange(n_classes, dtype=np.int64), per_class)
    noise = gaussian_array(rng, (n_classes * per_class, 2), 0.0, spread)
    return make_dataset(centers[labels] + noise, labels, name=f"blobs-{n_classes}x{per_class}", extractor="synthetic")


def nearest_centroid_accuracy(train: Dataset, test: Dataset) -> float:
    """Accuracy of classifying test rows by the nearest training class mean."""
    classes = np.unique(train.labels)
    centroids = np.stack([train.features[train.labels == c].mean(axis=0) for c in classes])
    d2 = ((test.features[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return float(np.mean(classes[np.argmin(d2, axis=1)] == test.labels))


def subsample(dataset: Dataset, count: Optional[int], rng: Rng) -> Dataset:
    """A seeded random subset of `count` rows (the whole set when count is None or too large)."""
    if count is None or count >= len(dataset):
        return dataset
    return dataset.subset(np.sort(permutation(len(dataset), rng)[:count]))


def batches(dataset: Dataset, batch_size: int, rng: Rng) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """One epoch of shuffled batches; the final short batch is kept."""
    if batch_size < 1:
        raise ValueError(f"Batch size must be at least 1, got {batch_size}")
    order = permutation(len(dataset), rng)
    for start in range(0, len(order), batch_size):
        index = order[start:start + batch_size]
        yield dataset.features[index], dataset.labels[index]


def endless_batches(dataset: Dataset, batch_size: int, rng: Rng) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Batches across epochs, reshuffling at the start of each."""
    if len(dataset) == 0:
        raise EmptyDatasetError(f"Cannot batch empty dataset '{dataset.name}'")
    while True:
        yield from batches(dataset, batch_size, rng)
