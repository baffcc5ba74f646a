"""Categorical tabular data: loading, encoding, binning and projection.

Every column is stored as dense integer codes ``0 .. arity-1`` together with
the original string label of each code, so a dataset can always be written
back out unchanged.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed or inconsistent tabular input."""


@dataclass(frozen=True, eq=False)
class FeatureColumn:
    """One categorical feature.

    ``labels[c]`` is the source string that code ``c`` stands for.
    """

    name: str
    codes: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        if codes.ndim != 1:
            raise DatasetError(f"column {self.name!r}: codes must be 1-d")
        if not self.name:
            raise DatasetError("feature names must be non-empty")
        arity = len(self.labels)
        if arity < 1:
            raise DatasetError(f"column {self.name!r}: arity must be >= 1")
        if codes.size:
            if codes.min() < 0 or codes.max() >= arity:
                raise DatasetError(f"column {self.name!r}: code out of range [0, {arity})")
            if np.unique(codes).size != arity:
                raise DatasetError(f"column {self.name!r}: codes are not dense")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def arity(self) -> int:
        return len(self.labels)

    @property
    def original_labels(self) -> dict[int, str]:
        return dict(enumerate(self.labels))

    def decode(self) -> list[str]:
        return [self.labels[c] for c in self.codes]

    def __eq__(self, other):
        if not isinstance(other, FeatureColumn):
            return NotImplemented
        return (
            self.name == other.name
            and self.labels == other.labels
            and np.array_equal(self.codes, other.codes)
        )

    __hash__ = None


def _is_missing(value) -> bool:
    if value is None:
        return True
    try:
        return isinstance(value, float) and math.isnan(value)
    except TypeError:
        return False


def encode_column(values: Iterable, name: str, missing_label: str = "") -> FeatureColumn:
    """Encode raw values by order of first appearance.

    ``None`` and float NaN are folded into a single category labelled
    ``missing_label``.
    """
    mapping: dict = {}
    labels: list[str] = []
    codes = []
    for value in values:
        key = ("__missing__",) if _is_missing(value) else value
        code = mapping.get(key)
        if code is None:
            code = mapping[key] = len(labels)
            labels.append(missing_label if key == ("__missing__",) else str(value))
        codes.append(code)
    return FeatureColumn(name, np.asarray(codes, dtype=np.int64), tuple(labels))


@dataclass(frozen=True, eq=False)
class CategoricalDataset:
    """Immutable collection of equally long categorical columns."""

    columns: tuple[FeatureColumn, ...]
    name: str = "dataset"

    def __post_init__(self):
        columns = tuple(self.columns)
        if not columns:
            raise DatasetError("a dataset needs at least one feature")
        n_rows = columns[0].codes.size
        if n_rows < 1:
            raise DatasetError("a dataset needs at least one row")
        seen = set()
        for col in columns:
            if col.codes.size != n_rows:
                raise DatasetError(
                    f"column {col.name!r} has {col.codes.size} rows, expected {n_rows}"
                )
            if col.name in seen:
                raise DatasetError(f"duplicate feature name {col.name!r}")
            seen.add(col.name)
        object.__setattr__(self, "columns", columns)

    @classmethod
    def from_array(cls, X, feature_names: Sequence[str] | None = None, name: str = "dataset"):
        """Build a dataset from a 2-d array-like of arbitrary hashable values."""
        X = np.asarray(X, dtype=object)
        if X.ndim != 2:
            raise DatasetError(f"expected a 2-d array, got shape {X.shape}")
        if feature_names is None:
            feature_names = [f"x{j}" for j in range(X.shape[1])]
        if len(feature_names) != X.shape[1]:
            raise DatasetError("feature_names length does not match the number of columns")
        cols = tuple(encode_column(X[:, j], str(feature_names[j])) for j in range(X.shape[1]))
        return cls(cols, name=name)

    @classmethod
    def from_codes(cls, codes, feature_names: Sequence[str] | None = None, name: str = "dataset"):
        """Build a dataset from non-negative integer codes (rows x features).

        Codes are compacted per column preserving their numeric order, so a
        column that already uses every value in ``0..arity-1`` is kept as is.
        """
        codes = np.asarray(codes)
        if codes.ndim != 2 or not np.issubdtype(codes.dtype, np.integer):
            raise DatasetError("codes must be a 2-d integer array")
        if feature_names is None:
            feature_names = [f"f{j}" for j in range(codes.shape[1])]
        cols = []
        for j in range(codes.shape[1]):
            values, inverse = np.unique(codes[:, j], return_inverse=True)
            cols.append(FeatureColumn(str(feature_names[j]), inverse, tuple(str(v) for v in values)))
        return cls(tuple(cols), name=name)

    @property
    def n_rows(self) -> int:
        return self.columns[0].codes.size

    @property
    def n_features(self) -> int:
        return len(self.columns)

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def arities(self) -> list[int]:
        return [c.arity for c in self.columns]

    @cached_property
    def codes(self) -> np.ndarray:
        """Read-only ``(n_rows, n_features)`` code matrix."""
        mat = np.column_stack([c.codes for c in self.columns])
        mat.setflags(write=False)
        return mat

    @cached_property
    def fingerprint(self) -> str:
        """64-bit content hash of the codes, as 16 hex digits."""
        h = hashlib.blake2b(digest_size=8)
        h.update(np.asarray(self.codes.shape, dtype="<i8").tobytes())
        h.update(np.ascontiguousarray(self.codes, dtype="<i8").tobytes())
        return h.hexdigest()

    def index_of(self, feature: str | int) -> int:
        if isinstance(feature, (int, np.integer)):
            if not 0 <= feature < self.n_features:
                raise DatasetError(f"feature index {feature} out of range")
            return int(feature)
        try:
            return self.feature_names.index(feature)
        except ValueError:
            raise DatasetError(f"unknown feature {feature!r}") from None

    def decode(self) -> list[list[str]]:
        """Rows of original labels."""
        decoded = [c.decode() for c in self.columns]
        return [list(row) for row in zip(*decoded)]

    def __eq__(self, other):
        if not isinstance(other, CategoricalDataset):
            return NotImplemented
        return self.name == other.name and self.columns == other.columns

    __hash__ = None


@dataclass
class IngestOptions:
    drop_columns: Sequence[str] = ()
    missing_token: str = ""
    drop_missing: bool = False
    bins: dict[str, int] = field(default_factory=dict)
    max_rows: int | None = None


def bin_numeric(column: Sequence[float], n_bins: int, name: str = "binned") -> FeatureColumn:
    """Equal-width discretisation over ``[min, max]``.

    A value lying exactly on an interior edge goes to the lower bin and the
    maximum goes to the last bin. Empty bins are dropped and the remaining
    ones renumbered in increasing order so that codes stay dense.
    """
    if n_bins < 1:
        raise DatasetError("n_bins must be >= 1")
    x = np.asarray(column, dtype=float)
    if x.size == 0:
        raise DatasetError("cannot bin an empty column")
    if np.isnan(x).any():
        raise DatasetError(f"column {name!r} contains NaN")
    if not np.isfinite(x).all():
        raise DatasetError(f"column {name!r} contains non-finite values")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return FeatureColumn(name, np.zeros(x.size, dtype=np.int64), (f"[{lo:g}, {hi:g}]",))
    width = (hi - lo) / n_bins
    edges = lo + width * np.arange(1, n_bins)
    raw = np.searchsorted(edges, x, side="left")
    bounds = np.concatenate([[lo], edges, [hi]])
    used, codes = np.unique(raw, return_inverse=True)
    labels = tuple(f"({bounds[b]:g}, {bounds[b + 1]:g}]" if b else f"[{bounds[0]:g}, {bounds[1]:g}]" for b in used)
    return FeatureColumn(name, codes, labels)


def project(ds: CategoricalDataset, subset: Iterable[int]) -> CategoricalDataset:
    """Restrict ``ds`` to the features in ``subset`` (ascending index order)."""
    idx = sorted({int(i) for i in subset})
    if not idx:
        raise DatasetError("cannot project onto an empty feature subset")
    if idx[0] < 0 or idx[-1] >= ds.n_features:
        raise DatasetError(f"feature index out of range for {ds.n_features} features")
    return CategoricalDataset(tuple(ds.columns[i] for i in idx), name=ds.name)


def load_csv(path: str | Path, options: IngestOptions | None = None) -> CategoricalDataset:
    """Read a headed CSV file into a :class:`CategoricalDataset`.

    Raw strings are encoded by order of first appearance; the missing-value
    token is an ordinary category unless ``drop_missing`` is set.
    """
    options = options or IngestOptions()
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: row {reader.line_num} has {len(row)} fields, expected {len(header)}"
                )
            rows.append(row)
            if options.max_rows is not None and len(rows) >= options.max_rows:
                break

    header = [h.strip() for h in header]
    dupes = sorted({h for h in header if header.count(h) > 1})
    if dupes:
        raise DatasetError(f"{path}: duplicate column names {dupes}")
    if any(not h for h in header):
        raise DatasetError(f"{path}: empty column name in header")
    unknown = [c for c in list(options.drop_columns) + list(options.bins) if c not in header]
    if unknown:
        raise DatasetError(f"{path}: unknown columns {unknown}")
    keep = [j for j, h in enumerate(header) if h not in set(options.drop_columns)]
    if not keep:
        raise DatasetError(f"{path}: no columns left after dropping")
    if options.drop_missing:
        rows = [r for r in rows if all(r[j] != options.missing_token for j in keep)]
    if not rows:
        raise DatasetError(f"{path}: no data rows")

    columns = []
    for j in keep:
        raw = [r[j] for r in rows]
        name = header[j]
        if name in options.bins:
            try:
                values = [float("nan") if v == options.missing_token else float(v) for v in raw]
            except ValueError as exc:
                raise DatasetError(f"{path}: column {name!r} is not numeric ({exc})") from None
            columns.append(bin_numeric(values, options.bins[name], name=name))
        else:
            columns.append(encode_column(raw, name))
    return CategoricalDataset(tuple(columns), name=path.stem)


def write_csv(ds: CategoricalDataset, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ds.feature_names)
        writer.writerows(ds.decode())
