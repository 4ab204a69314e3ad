"""Time-series container used by every module.

Missing observations are encoded as NaN in ``values``; the optional index
carries integer positions or arbitrary labels (e.g. dates read from a CSV).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError


@dataclass(frozen=True, eq=False)
class Series:
    """A finite real-valued time series with optional missing entries.

    Attributes
    ----------
    values : np.ndarray
        Float array; NaN marks a missing observation.
    index : np.ndarray
        Labels of the same length (defaults to 0..n-1).
    """

    values: np.ndarray
    index: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        if not np.array_equal(self.values, other.values, equal_nan=True):
            return False
        if np.issubdtype(self.index.dtype, np.floating) and np.issubdtype(other.index.dtype, np.floating):
            return np.array_equal(self.index, other.index, equal_nan=True)
        return np.array_equal(self.index, other.index)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).copy()
        if values.ndim != 1:
            raise DataError("series values must be one-dimensional")
        if values.size < 1:
            raise DataError("series must contain at least one entry")
        if not np.isfinite(values[~np.isnan(values)]).all():
            raise DataError("series values must be finite or NaN")
        if np.isnan(values).all():
            raise DataError("series must contain at least one non-missing value")
        index = self.index
        if index is None:
            index = np.arange(values.size)
        else:
            index = np.asarray(index).copy()
            if index.shape != values.shape:
                raise DataError(
                    f"index length {index.size} does not match values length {values.size}"
                )
        values.setflags(write=False)
        index.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return self.values.size

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    @property
    def observed_mask(self) -> np.ndarray:
        return ~np.isnan(self.values)

    @property
    def n_observed(self) -> int:
        return int(self.observed_mask.sum())

    @property
    def observed_values(self) -> np.ndarray:
        return self.values[self.observed_mask]

    def with_values(self, values: np.ndarray) -> "Series":
        """Same index, new values."""
        return Series(values, self.index)


def as_series(y: "Series | Sequence[float] | np.ndarray") -> Series:
    """Accept a Series or any 1-d float sequence."""
    if isinstance(y, Series):
        return y
    return Series(np.asarray(y, dtype=float))
