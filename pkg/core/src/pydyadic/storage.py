import json
from pathlib import Path

import numpy as np

from pydyadic.dyadic import DyadicInterval, HaarExpansion, PiecewiseConstant
from pydyadic.hankel import SpectralPolynomial
from pydyadic.hilbert import PiecewiseLinear
from pydyadic.paraproduct import Signature

SCHEMA = 1


def _floats(values):
    return [float(v) for v in values]


# convert a domain value into a kind-tagged JSON compatible entry
def to_entry(value):
    if isinstance(value, PiecewiseConstant):
        return {
            "kind": "piecewise_constant",
            "breakpoints": _floats(value.breakpoints),
            "values": _floats(value.values),
        }
    if isinstance(value, PiecewiseLinear):
        return {
            "kind": "piecewise_linear",
            "breakpoints": _floats(value.breakpoints),
            "values": _floats(value.values),
        }
    if isinstance(value, HaarExpansion):
        return {
            "kind": "haar_expansion",
            "domain": value.domain.key,
            "min_scale": value.min_scale,
            "mean": value.mean,
            "coeffs": {I.key: c for I, c in value.coeffs.items() if c},
        }
    if isinstance(value, SpectralPolynomial):
        return {
            "kind": "spectral_polynomial",
            "band": value.band,
            "coeffs": [
                [k, float(c.real), float(c.imag)] for k, c in value.items() if c
            ],
        }
    if isinstance(value, Signature):
        return {"kind": "signature", "letters": list(value)}
    if isinstance(value, DyadicInterval):
        return {"kind": "interval", "key": value.key}
    raise TypeError(f"Unexpected value: {value!r}")


# convert a kind-tagged entry back into a domain value
def from_entry(entry):
    kind = entry.get("kind")
    if kind == "piecewise_constant":
        return PiecewiseConstant(entry["breakpoints"], entry["values"])
    if kind == "piecewise_linear":
        return PiecewiseLinear(entry["breakpoints"], entry["values"])
    if kind == "haar_expansion":
        return HaarExpansion.from_coeffs(
            DyadicInterval.from_key(entry["domain"]),
            entry["coeffs"],
            entry["min_scale"],
            entry.get("mean", 0.0),
        )
    if kind == "spectral_polynomial":
        coeffs = {int(k): complex(re, im) for k, re, im in entry["coeffs"]}
        return SpectralPolynomial.from_dict(coeffs, band=entry.get("band"))
    if kind == "signature":
        return Signature(*entry["letters"])
    if kind == "interval":
        return DyadicInterval.from_key(entry["key"])
    raise ValueError(f"Unknown entry kind: {kind!r}")


def plain(value):
    """
    Turn numpy scalars and arrays, tuples and non-finite floats into values
    json can write deterministically.
    """
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def dumps(value):
    return json.dumps(plain(value), sort_keys=True, indent=2) + "\n"


def to_json(value):
    return dumps(to_entry(value))


def from_json(text):
    return from_entry(json.loads(text))


class Storage(dict):
    """
    A dict persisted as one JSON file; `sync()` writes it back.
    """

    def __init__(self, path):
        self.__path__ = Path(path)
        data = {}
        if self.__path__.exists():
            data = json.loads(self.__path__.read_text())
        super().__init__(data)

    def sync(self):
        self.__path__.write_text(dumps(dict(self)))


def storage(path="", storage_class=Storage):
    if not path:
        raise ValueError("The storage path must be defined")
    return storage_class(path)
