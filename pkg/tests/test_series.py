import numpy as np
import pytest

from misreport import DataError, Series


def test_series_defaults_integer_index():
    s = Series(np.array([1.0, 2.0, np.nan]))
    assert np.array_equal(s.index, [0, 1, 2])
    assert s.n_observed == 2
    assert np.array_equal(s.observed_values, [1.0, 2.0])


def test_series_rejects_empty_and_all_missing():
    with pytest.raises(DataError):
        Series(np.array([]))
    with pytest.raises(DataError):
        Series(np.array([np.nan, np.nan]))


def test_series_rejects_infinite_values():
    with pytest.raises(DataError):
        Series(np.array([1.0, np.inf]))


def test_series_index_length_checked():
    with pytest.raises(DataError):
        Series(np.array([1.0, 2.0]), index=np.array(["a"]))


def test_series_values_are_frozen():
    s = Series(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_with_values_keeps_index():
    s = Series(np.array([1.0, 2.0]), index=np.array(["a", "b"]))
    t = s.with_values(np.array([3.0, 4.0]))
    assert np.array_equal(t.index, s.index)
    assert np.array_equal(t.values, [3.0, 4.0])
