"""Sectioned key=value experiment files and their schema.

The on-disk format is INI as understood by :mod:`configparser`: named
sections holding ``key = value`` lines, ``#`` comments.  ``parse_config``
reads a file, applies command-line overrides, type-checks everything
against the schema below and returns a validated
:class:`~bousfem.experiments.ExperimentConfig`.  ``render_config`` writes
the canonical text back out, so an echoed config is diffable against the
file it came from.

Sections: ``[experiment]`` (model, mesh, schedule), ``[bathymetry]`` and
``[initial]`` (a ``kind`` plus that kind's parameters), ``[boundary]``,
``[output]`` (snapshots and gauges), ``[measure]`` (reflected-wave
measurement) and ``[scaling]`` (dimensional units).  Unknown sections and
keys are rejected with the offending location in the message.
"""

from __future__ import annotations

import configparser
import inspect
import os

import numpy as np

from . import bathymetry as beds
from .experiments import ExperimentConfig, ScalingLayer
from .models import KINDS

__all__ = ["ConfigError", "parse_config", "apply_overrides", "render_config"]


class ConfigError(ValueError):
    """Schema violation carrying the section and key it occurred at."""

    def __init__(self, section, key, message):
        self.section = section
        self.key = key
        where = f"[{section}]" if key is None else f"[{section}] {key}"
        super().__init__(f"{where}: {message}")


# -- value coercion --------------------------------------------------------


def _as_float(s):
    return float(s)


def _as_int(s):
    f = float(s)
    if f != int(f):
        raise ValueError(f"expected an integer, got {s!r}")
    return int(f)


def _as_bool(s):
    low = s.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _as_floats(s):
    parts = s.replace(",", " ").split()
    if not parts:
        return ()
    return tuple(float(p) for p in parts)


def _as_str(s):
    return s.strip()


# Fixed-schema sections: key -> (coercer, required).  The bathymetry and
# initial sections are validated separately against their declared kind.
_SCHEMA = {
    "experiment": {
        "name": (_as_str, False),
        "kind": (_as_str, False),
        "eps": (_as_float, False),
        "mu": (_as_float, False),
        "domain": (_as_floats, True),
        "n_elements": (_as_int, True),
        "courant": (_as_float, False),
        "steps": (_as_int, False),
        "T": (_as_float, True),
    },
    "boundary": {
        "left": (_as_str, False),
        "right": (_as_str, False),
        "allow_sloping_outflow": (_as_bool, False),
    },
    "output": {
        "snapshots": (_as_floats, False),
        "gauges": (_as_floats, False),
        "gauge_stride": (_as_int, False),
    },
    "measure": {
        "window": (_as_floats, False),
        "theta": (_as_float, False),
        "width_theta": (_as_float, False),
        "time": (_as_float, False),
    },
    "scaling": {
        "h0": (_as_float, True),
        "g": (_as_float, False),
    },
}

_SECTIONS = ("experiment", "bathymetry", "initial", "boundary", "output",
             "measure", "scaling")

# Convenience spellings accepted in overrides only.
_OVERRIDE_ALIASES = {"N": ("experiment", "n_elements")}

_INITIAL_PARAMS = {
    "zero": {"required": (), "optional": ()},
    "kdv": {"required": ("a0", "x0"), "optional": ("geometry", "alpha")},
    "heap": {"required": ("a0", "x0"), "optional": ("geometry", "alpha")},
    "solitary": {"required": ("x0",), "optional": ("amplitude", "speed")},
}


def _read_ini(path):
    parser = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#",),
        strict=True,
        interpolation=None,
    )
    # Keys are case-sensitive (the time horizon is spelled "T").
    parser.optionxform = str
    with open(path) as fh:
        parser.read_file(fh, source=os.fspath(path))
    raw = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(section, None,
                              f"unknown section (choose from {_SECTIONS})")
        raw[section] = dict(parser.items(section))
    if "experiment" not in raw:
        raise ConfigError("experiment", None, "section is required")
    return raw


def apply_overrides(raw, overrides):
    """Apply ``key=value`` strings onto the raw section dictionaries.

    Keys may be qualified (``section.key``) or bare; a bare key must
    resolve to exactly one section of the schema or of the file.
    """
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key in _OVERRIDE_ALIASES:
            section, key = _OVERRIDE_ALIASES[key]
        elif "." in key:
            section, key = key.split(".", 1)
            if section not in _SECTIONS:
                raise ConfigError(section, key, "unknown section")
        else:
            hits = [s for s, keys in _SCHEMA.items() if key in keys]
            hits += [s for s in ("bathymetry", "initial")
                     if key in raw.get(s, {})]
            if not hits:
                raise ValueError(f"override key {key!r} matches no schema field")
            if len(hits) > 1:
                raise ValueError(
                    f"override key {key!r} is ambiguous between sections {hits}; "
                    "qualify it as section.key"
                )
            section = hits[0]
        raw.setdefault(section, {})[key] = value
    return raw


def _coerce_fixed(section, entries):
    out = {}
    schema = _SCHEMA[section]
    for key, value in entries.items():
        if key not in schema:
            raise ConfigError(section, key,
                              f"unknown key (choose from {sorted(schema)})")
        coerce, _ = schema[key]
        try:
            out[key] = coerce(value)
        except ValueError as exc:
            raise ConfigError(section, key, str(exc)) from None
    for key, (_, required) in schema.items():
        if required and key not in out:
            raise ConfigError(section, key, "required key is missing")
    return out


def _coerce_bathymetry(entries):
    if "kind" not in entries:
        raise ConfigError("bathymetry", "kind", "required key is missing")
    kind = entries["kind"].strip()
    try:
        ctor = beds.profile_constructor(kind)
    except KeyError:
        raise ConfigError("bathymetry", "kind",
                          f"unknown profile {kind!r} "
                          f"(choose from {sorted(beds.profile_kinds())})") from None
    params = inspect.signature(ctor).parameters
    out = {"kind": kind}
    for key, value in entries.items():
        if key == "kind":
            continue
        if key not in params:
            raise ConfigError("bathymetry", key,
                              f"profile {kind!r} takes {sorted(params)}")
        try:
            out[key] = _as_float(value)
        except ValueError as exc:
            raise ConfigError("bathymetry", key, str(exc)) from None
    missing = [p.name for p in params.values()
               if p.default is inspect.Parameter.empty and p.name not in out]
    if missing:
        raise ConfigError("bathymetry", missing[0],
                          f"profile {kind!r} requires {missing}")
    return out


def _coerce_initial(entries):
    kind = entries.get("kind", "zero").strip()
    if kind not in _INITIAL_PARAMS:
        raise ConfigError("initial", "kind",
                          f"unknown initial data {kind!r} "
                          f"(choose from {sorted(_INITIAL_PARAMS)})")
    spec = _INITIAL_PARAMS[kind]
    allowed = set(spec["required"]) | set(spec["optional"])
    out = {"kind": kind}
    for key, value in entries.items():
        if key == "kind":
            continue
        if key not in allowed:
            raise ConfigError("initial", key,
                              f"initial data {kind!r} takes {sorted(allowed)}")
        if key == "geometry":
            if value not in ("flat", "slope"):
                raise ConfigError("initial", key,
                                  "geometry must be 'flat' or 'slope'")
            out[key] = value
        else:
            try:
                out[key] = _as_float(value)
            except ValueError as exc:
                raise ConfigError("initial", key, str(exc)) from None
    for key in spec["required"]:
        if key not in out:
            raise ConfigError("initial", key, "required key is missing")
    if kind == "solitary":
        if ("amplitude" in out) == ("speed" in out):
            raise ConfigError("initial", "amplitude",
                              "give exactly one of amplitude or speed")
    if out.get("geometry") == "slope" and "alpha" not in out:
        raise ConfigError("initial", "alpha",
                          "slope geometry needs the slope value alpha")
    return out


def _check_depth_positive(cfg):
    """Sample the depth away from the endpoints and reject a drowned bed.

    A shoreline endpoint may legitimately take the depth to zero; interior
    sample points must stay strictly positive for the system to assemble.
    """
    spec = dict(cfg.bathymetry)
    kind = spec.pop("kind")
    try:
        bathy = beds.make_profile(kind, **spec)
    except ValueError as exc:
        raise ConfigError("bathymetry", kind, str(exc)) from None
    a, b = cfg.domain
    h = (b - a) / cfg.n_elements
    xs = a + h * (np.arange(cfg.n_elements) + 0.5)
    depth = bathy.depth(xs)
    j = int(np.argmin(depth))
    if depth[j] <= 0.0:
        raise ConfigError(
            "bathymetry", kind,
            f"undisturbed depth is {depth[j]:.3g} at x={xs[j]:.6g}; "
            "the bed reaches or crosses the surface inside the domain"
        )
    if not (bathy.x_lo <= a and b <= bathy.x_hi):
        raise ConfigError(
            "bathymetry", kind,
            f"profile interval [{bathy.x_lo:g}, {bathy.x_hi:g}] does not "
            f"cover the domain [{a:g}, {b:g}]"
        )


_KIND_BY_LOWER = {k.lower(): k for k in KINDS}


def parse_config(path, overrides=()) -> ExperimentConfig:
    """Read, override, type-check and validate one experiment file."""
    raw = apply_overrides(_read_ini(path), overrides)

    exp = _coerce_fixed("experiment", raw["experiment"])
    if len(exp["domain"]) != 2:
        raise ConfigError("experiment", "domain",
                          "expected two values, the interval endpoints")
    kind = exp.get("kind", "CB")
    if kind.lower() not in _KIND_BY_LOWER:
        raise ConfigError("experiment", "kind",
                          f"unknown model {kind!r} (choose from {KINDS})")
    bnd = _coerce_fixed("boundary", raw.get("boundary", {}))
    out = _coerce_fixed("output", raw.get("output", {}))
    mea = _coerce_fixed("measure", raw.get("measure", {}))
    if "window" in mea and len(mea["window"]) != 2:
        raise ConfigError("measure", "window", "expected two values")

    scaling = None
    if "scaling" in raw:
        sca = _coerce_fixed("scaling", raw["scaling"])
        scaling = ScalingLayer(h0=sca["h0"], g=sca.get("g", 9.80665))

    name = exp.get("name")
    if name is None:
        name = os.path.splitext(os.path.basename(os.fspath(path)))[0]

    cfg = ExperimentConfig(
        name=name,
        kind=_KIND_BY_LOWER[kind.lower()],
        eps=exp.get("eps", 1.0),
        mu=exp.get("mu", 1.0),
        domain=tuple(exp["domain"]),
        n_elements=exp["n_elements"],
        courant=exp.get("courant", 0.5),
        steps=exp.get("steps"),
        bathymetry=_coerce_bathymetry(raw.get("bathymetry", {"kind": "Flat"})),
        initial=_coerce_initial(raw.get("initial", {"kind": "zero"})),
        bc=(bnd.get("left", "Reflective"), bnd.get("right", "Reflective")),
        allow_sloping_outflow=bnd.get("allow_sloping_outflow", False),
        T=exp["T"],
        gauges=out.get("gauges", ()),
        gauge_stride=out.get("gauge_stride", 1),
        snapshot_times=out.get("snapshots", ()),
        measure_window=mea.get("window"),
        measure_theta=mea.get("theta", 0.8),
        measure_width_theta=mea.get("width_theta", 0.5),
        measure_time=mea.get("time"),
        scaling=scaling,
    )
    try:
        cfg.validate()
    except (ValueError, FileNotFoundError) as exc:
        raise ConfigError("experiment", None, str(exc)) from None
    _check_depth_positive(cfg)
    return cfg


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return " ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(cfg: ExperimentConfig) -> str:
    """Canonical text of a config, suitable for echoing next to outputs."""
    lines = ["[experiment]"]
    lines.append(f"name = {cfg.name}")
    lines.append(f"kind = {cfg.kind}")
    lines.append(f"eps = {_fmt(cfg.eps)}")
    lines.append(f"mu = {_fmt(cfg.mu)}")
    lines.append(f"domain = {_fmt(cfg.domain)}")
    lines.append(f"n_elements = {cfg.n_elements}")
    if cfg.steps is not None:
        lines.append(f"steps = {cfg.steps}")
    else:
        lines.append(f"courant = {_fmt(cfg.courant)}")
    lines.append(f"T = {_fmt(cfg.T)}")

    lines.append("")
    lines.append("[bathymetry]")
    lines.append(f"kind = {cfg.bathymetry['kind']}")
    for key in sorted(k for k in cfg.bathymetry if k != "kind"):
        lines.append(f"{key} = {_fmt(cfg.bathymetry[key])}")

    lines.append("")
    lines.append("[initial]")
    lines.append(f"kind = {cfg.initial['kind']}")
    for key in sorted(k for k in cfg.initial if k != "kind"):
        lines.append(f"{key} = {_fmt(cfg.initial[key])}")

    lines.append("")
    lines.append("[boundary]")
    lines.append(f"left = {cfg.bc[0]}")
    lines.append(f"right = {cfg.bc[1]}")
    if cfg.allow_sloping_outflow:
        lines.append("allow_sloping_outflow = true")

    if cfg.snapshot_times or cfg.gauges or cfg.gauge_stride != 1:
        lines.append("")
        lines.append("[output]")
        if cfg.snapshot_times:
            lines.append(f"snapshots = {_fmt(cfg.snapshot_times)}")
        if cfg.gauges:
            lines.append(f"gauges = {_fmt(cfg.gauges)}")
        if cfg.gauge_stride != 1:
            lines.append(f"gauge_stride = {cfg.gauge_stride}")

    if cfg.measure_window is not None:
        lines.append("")
        lines.append("[measure]")
        lines.append(f"window = {_fmt(cfg.measure_window)}")
        lines.append(f"theta = {_fmt(cfg.measure_theta)}")
        lines.append(f"width_theta = {_fmt(cfg.measure_width_theta)}")
        if cfg.measure_time is not None:
            lines.append(f"time = {_fmt(cfg.measure_time)}")

    if cfg.scaling is not None and cfg.scaling.dimensional:
        lines.append("")
        lines.append("[scaling]")
        lines.append(f"h0 = {_fmt(cfg.scaling.h0)}")
        lines.append(f"g = {_fmt(cfg.scaling.g)}")

    return "\n".join(lines) + "\n"
