"""
Ensure pydyadic.storage writes domain values and reports as stable JSON, and
that the Storage object behaves as a Python dict.
"""

import json

import numpy as np
import pytest

from pydyadic import storage as store
from pydyadic.dyadic import UNIT, DyadicInterval, HaarExpansion, PiecewiseConstant
from pydyadic.hankel import SpectralPolynomial
from pydyadic.hilbert import PiecewiseLinear
from pydyadic.paraproduct import Signature
from pydyadic.storage import Storage, from_json, storage, to_json


def test_storage_as_dict(tmp_path):
    """
    The storage object should behave as a Python dict.
    """
    test_store = storage(tmp_path / "store.json")
    # Assign
    test_store["a"] = 1
    # Retrieve
    assert test_store["a"] == 1
    assert "a" in test_store
    assert len(test_store) == 1
    # Remove
    del test_store["a"]
    assert "a" not in test_store
    assert len(test_store) == 0


def test_storage_sync(tmp_path):
    """
    Synced values are there when the file is opened again.
    """
    path = tmp_path / "store.json"
    test_store = storage(path)
    test_store["float"] = 3.14
    test_store["list"] = [1, 2, 3]
    test_store["nested"] = {"b": None, "a": True}
    test_store.sync()
    again = storage(path)
    assert isinstance(again, Storage)
    assert again == {"float": 3.14, "list": [1, 2, 3], "nested": {"a": True, "b": None}}
    assert again.__path__ == path


def test_storage_needs_a_path():
    """
    An empty path is refused.
    """
    with pytest.raises(ValueError, match="must be defined"):
        storage("")


def test_plain_values():
    """
    numpy values, tuples and non-finite floats become plain JSON values.
    """
    value = {
        1: np.float64(0.5),
        "b": (np.int64(2), np.bool_(True)),
        "c": np.array([1.0, np.inf]),
        "d": float("nan"),
    }
    assert store.plain(value) == {"1": 0.5, "b": [2, True], "c": [1.0, None], "d": None}


def test_dumps_is_sorted_and_newline_terminated():
    """
    Keys are sorted so equal reports render to equal bytes.
    """
    text = store.dumps({"b": 1, "a": 2})
    assert text == '{\n  "a": 2,\n  "b": 1\n}\n'


def test_step_function_entries():
    """
    Step functions and their linear cousins keep breakpoints and values.
    """
    f = PiecewiseConstant([0.0, 0.5, 1.0], [1.0, -2.0])
    entry = json.loads(to_json(f))
    assert entry == {
        "kind": "piecewise_constant",
        "breakpoints": [0.0, 0.5, 1.0],
        "values": [1.0, -2.0],
    }
    back = from_json(to_json(f))
    assert back.breakpoints.tolist() == f.breakpoints.tolist()
    assert back.values.tolist() == f.values.tolist()
    kernel = PiecewiseLinear([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
    assert from_json(to_json(kernel))(0.5) == 0.5


def test_expansion_entries_keep_nonzero_coefficients():
    """
    Haar expansions are written sparsely by interval key.
    """
    e = HaarExpansion.from_coeffs(UNIT, {"-1:1": 2.0}, -2, mean=0.25)
    entry = store.to_entry(e)
    assert entry["coeffs"] == {"-1:1": 2.0}
    assert entry["domain"] == "0:0"
    back = store.from_entry(entry)
    assert back.min_scale == -2
    assert back.mean == 0.25
    assert back.coefficient(DyadicInterval(-1, 1)) == 2.0


def test_small_entries():
    """
    Spectral polynomials, signatures and intervals.
    """
    b = SpectralPolynomial.from_dict({-1: 1j, 2: 0.5}, band=3)
    back = from_json(to_json(b))
    assert back == b
    assert back.band == 3
    assert from_json(to_json(Signature(0, 1, 0))) == Signature(0, 1, 0)
    assert from_json(to_json(DyadicInterval(-3, 5))) == DyadicInterval(-3, 5)


def test_unknown_values():
    """
    Values without a kind, in either direction, are refused.
    """
    with pytest.raises(TypeError):
        store.to_entry(object())
    with pytest.raises(ValueError):
        store.from_entry({"kind": "mystery"})
