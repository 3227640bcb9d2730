"""Named feature descriptors shared by the benchmark, pipeline, and CLI.

A descriptor is a feature name plus concrete parameters. ``compute`` returns
a 1-D array (length 1 for scalar features; one value per bin/coefficient/
segment-difference for vector features). For percentage-error benchmarking a
vector feature is reduced to one scalar, by default the component the
robustness study singles out: histogram bin 2 (of the 3-bin histogram) and
AR coefficient a_1. Components are numbered from 1.

Descriptor strings use ``name:key=value:key=value``, e.g. ``wamp:threshold=20``
or ``ar:order=2``; feature lists are comma separated.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import freq_features as ff
from . import time_features as tf
from .signals import amplitude_spectrum, power_spectrum

_THRESHOLDS = tf.ThresholdParams()

# name -> default params; ints where the feature needs counts/orders
_FAMILIES: dict[str, dict] = {
    "iemg": {},
    "mav": {},
    "mmav1": {},
    "mmav2": {},
    "mavslp": {"segments": tf.DEFAULT_MAVSLP_SEGMENTS},
    "ssi": {},
    "var": {},
    "rms": {},
    "wl": {},
    "zc": {"threshold": _THRESHOLDS.zc},
    "ssc": {"threshold": _THRESHOLDS.ssc},
    "wamp": {"threshold": _THRESHOLDS.wamp},
    "hemg": {"bins": tf.DEFAULT_HEMG_BINS, "limit": None},
    "ar": {"order": 1},
    "mnf": {"dc": 1},
    "mdf": {"dc": 1},
    "mmnf": {"dc": 1},
    "mmdf": {"dc": 1},
}

_INT_PARAMS = {"segments", "bins", "order", "dc"}
_DEFAULT_SCALAR_COMPONENT = {"hemg": 2, "ar": 1, "mavslp": 1}

FEATURE_NAMES = tuple(_FAMILIES)

# Feature-set shorthands used in the recognition experiments.
FEATURE_SETS = {
    "hudgins": "mav,wl,zc,ssc",
    "oskoei": "rms,ar:order=2",
    "robust": "hemg,wamp,mmnf",
}


@dataclass(frozen=True)
class FeatureDescriptor:
    """One named feature with pinned parameters.

    ``scalar_component`` picks the 1-based component used when a single value
    is needed (percentage error); ``vector_mean`` switches that reduction to
    the mean PE over all components instead.
    """

    name: str
    params: tuple[tuple[str, float], ...] = ()
    scalar_component: int = 1
    vector_mean: bool = False

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    @property
    def label(self) -> str:
        shown = [(k, v) for k, v in self.params if v != _FAMILIES[self.name].get(k)]
        if not shown:
            return self.name
        return self.name + "(" + ",".join(f"{k}={v:g}" for k, v in shown) + ")"

    @property
    def param_text(self) -> str:
        return ";".join(f"{k}={'auto' if v is None else format(v, 'g')}"
                        for k, v in self.params)

    def needs_resolution(self) -> bool:
        """True while a data-dependent parameter (hemg limit) is still unset."""
        return self.name == "hemg" and self.param_dict.get("limit") is None

    def resolved(self, hemg_limit: float) -> "FeatureDescriptor":
        """Fill the histogram range from the clean data it will describe."""
        if not self.needs_resolution():
            return self
        params = self.param_dict
        params["limit"] = float(hemg_limit)
        return replace(self, params=tuple(sorted(params.items())))

    def component_count(self) -> int:
        p = self.param_dict
        if self.name == "hemg":
            return int(p["bins"])
        if self.name == "ar":
            return int(p["order"])
        if self.name == "mavslp":
            return int(p["segments"]) - 1
        return 1

    def component_names(self) -> list[str]:
        count = self.component_count()
        if count == 1:
            return [self.label]
        return [f"{self.label}[{i + 1}]" for i in range(count)]

    def compute(self, window: np.ndarray, rate: float) -> np.ndarray:
        """Evaluate the feature on one window; always returns a 1-D array."""
        p = self.param_dict
        name = self.name
        if name == "iemg":
            value = tf.iemg(window)
        elif name == "mav":
            value = tf.mav(window)
        elif name == "mmav1":
            value = tf.mmav1(window)
        elif name == "mmav2":
            value = tf.mmav2(window)
        elif name == "mavslp":
            return np.asarray(tf.mavslp(window, segments=int(p["segments"])), dtype=float)
        elif name == "ssi":
            value = tf.ssi(window)
        elif name == "var":
            value = tf.var(window)
        elif name == "rms":
            value = tf.rms(window)
        elif name == "wl":
            value = tf.wl(window)
        elif name == "zc":
            value = tf.zc(window, threshold=p["threshold"])
        elif name == "ssc":
            value = tf.ssc(window, threshold=p["threshold"])
        elif name == "wamp":
            value = tf.wamp(window, threshold=p["threshold"])
        elif name == "hemg":
            limit = p.get("limit")
            if limit is None:
                raise ValueError("hemg descriptor used before its range was resolved")
            return np.asarray(tf.hemg(window, bins=int(p["bins"]), limit=limit), dtype=float)
        elif name == "ar":
            return ff.ar_coefficients(window, order=int(p["order"])).coefficients
        elif name in ("mnf", "mdf", "mmnf", "mmdf"):
            include_dc = bool(p.get("dc", 1))
            spec = amplitude_spectrum(window, rate)
            if name == "mmnf":
                value = ff.mmnf(spec, include_dc)
            elif name == "mmdf":
                value = ff.mmdf(spec, include_dc)
            else:
                ps = power_spectrum(spec)
                value = ff.mnf(ps, include_dc) if name == "mnf" else ff.mdf(ps, include_dc)
        else:
            raise ValueError(f"unknown feature {name!r}")
        return np.array([float(value)])

    def scalarize(self, values: np.ndarray) -> float:
        idx = self.scalar_component - 1
        if not 0 <= idx < values.size:
            raise ValueError(
                f"{self.label}: scalar component {self.scalar_component} out of "
                f"range for {values.size} components"
            )
        return float(values[idx])


def make_descriptor(name: str, params: dict | None = None, *,
                    vector_mean: bool = False) -> FeatureDescriptor:
    """Build a descriptor from a family name and parameter overrides."""
    if name not in _FAMILIES:
        raise ValueError(
            f"unknown feature {name!r}; valid names: {', '.join(FEATURE_NAMES)}"
        )
    merged = dict(_FAMILIES[name])
    for key, value in (params or {}).items():
        if key not in merged:
            raise ValueError(f"feature {name!r} has no parameter {key!r}")
        merged[key] = int(value) if key in _INT_PARAMS else float(value)
    return FeatureDescriptor(
        name=name,
        params=tuple(sorted(merged.items(), key=lambda kv: kv[0])),
        scalar_component=_DEFAULT_SCALAR_COMPONENT.get(name, 1),
        vector_mean=vector_mean,
    )


def parse_feature(token: str) -> FeatureDescriptor:
    """Parse one ``name[:key=value...]`` token."""
    parts = token.strip().split(":")
    name = parts[0].strip().lower()
    params = {}
    for part in parts[1:]:
        if "=" not in part:
            raise ValueError(f"malformed feature parameter {part!r} in {token!r}")
        key, _, raw = part.partition("=")
        try:
            params[key.strip()] = float(raw)
        except ValueError as exc:
            raise ValueError(f"non-numeric value for {key!r} in {token!r}") from exc
    return make_descriptor(name, params)


def parse_features(text: str) -> list[FeatureDescriptor]:
    """Parse a comma-separated feature list."""
    tokens = [t for t in text.split(",") if t.strip()]
    if not tokens:
        raise ValueError("empty feature list")
    return [parse_feature(t) for t in tokens]


def feature_set(name_or_spec: str) -> tuple[str, list[FeatureDescriptor]]:
    """Resolve a set alias (hudgins/oskoei/robust) or ``name=feat+feat`` spec."""
    text = name_or_spec.strip()
    if "=" in text and ":" not in text.split("=")[0]:
        set_name, _, body = text.partition("=")
        return set_name.strip(), parse_features(body.replace("+", ","))
    if text.lower() in FEATURE_SETS:
        return text.lower(), parse_features(FEATURE_SETS[text.lower()])
    raise ValueError(
        f"unknown feature set {text!r}; aliases: {', '.join(FEATURE_SETS)} "
        "(or define one as name=feat+feat)"
    )


def default_panel() -> list[FeatureDescriptor]:
    """The representative robustness panel the benchmark runs by default."""
    return parse_features("rms,zc,wamp,ssc,hemg,ar,mnf,mdf,mmnf,mmdf")


def resolve_hemg_limit(descriptors, signals) -> list[FeatureDescriptor]:
    """Pin unresolved histogram ranges to the peak |amplitude| of clean data.

    ``signals`` is an iterable of 1-D sample arrays (the clean material the
    descriptors will be applied to, e.g. the training split).
    """
    if not any(d.needs_resolution() for d in descriptors):
        return list(descriptors)
    peak = 0.0
    for samples in signals:
        arr = np.asarray(samples, dtype=float)
        if arr.size:
            peak = max(peak, float(np.max(np.abs(arr))))
    if peak <= 0:
        raise ValueError("cannot resolve hemg range: clean data is all zero")
    return [d.resolved(peak) for d in descriptors]
