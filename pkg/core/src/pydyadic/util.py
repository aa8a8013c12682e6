import numpy as np

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def member_rng(seed, index):
    """
    The random stream of ensemble member `index`. Streams are spawned from one
    SeedSequence, so member i sees the same numbers whatever the ensemble size
    or the order members are evaluated in.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def summarize(values, quantiles=QUANTILES):
    """
    min, max and the given quantiles of a sample, as plain floats.
    """
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return {"count": 0, "min": None, "max": None, "quantiles": {}}
    return {
        "count": int(values.size),
        "min": float(values.min()),
        "max": float(values.max()),
        "quantiles": {f"{q:g}": float(np.quantile(values, q)) for q in quantiles},
    }


def relative_change(before, after):
    if before == 0:
        return 0.0 if after == 0 else float("inf")
    return abs(after - before) / abs(before)


def band_drift(before, after, low="0.05", high="0.95"):
    """
    Relative change of the band endpoints (two quantiles) between the
    summaries of an ensemble and of its doubled version.
    """
    if not before["count"] or not after["count"]:
        return {"low": None, "high": None}
    return {
        "low": relative_change(before["quantiles"][low], after["quantiles"][low]),
        "high": relative_change(before["quantiles"][high], after["quantiles"][high]),
    }


class NotSupported:
    """
    Small helper that raises exceptions if you try to get/set any attribute on
    it, or call it.
    """

    def __init__(self, name, error):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "error", error)

    def __repr__(self):
        return f"<NotSupported {self.name} [{self.error}]>"

    def __getattr__(self, attr):
        raise AttributeError(self.error)

    def __setattr__(self, attr, value):
        raise AttributeError(self.error)

    def __call__(self, *args, **kwargs):
        raise TypeError(self.error)
