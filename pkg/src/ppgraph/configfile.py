"""Flat ``key = value`` settings files.

Blank lines and lines starting with ``#`` are ignored. Keys mirror the
command-line flag names without the leading dashes. Simulation specs use
the same format with per-type keys::

    seed = 7
    types = a, b, c
    a.model = cluster
    a.parent-intensity = 120
    a.mean-offspring = 2.5
    a.sigma = 0.02
    a.groups = 1
    c.model = poisson
    c.intensity = 300
"""
from __future__ import annotations

import io
from pathlib import Path

from .pattern import ValidationError
from .sim import ClusterType, PoissonType, SimSpec

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse(text: str) -> dict[str, str]:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {n}: expected 'key = value', got {raw!r}")
        key = key.strip()
        if key in out:
            raise ValueError(f"line {n}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def read(path) -> dict[str, str]:
    return parse(Path(path).read_text(encoding="utf-8"))


def sim_spec_from_dict(kv: dict[str, str]) -> SimSpec:
    labels = [t.strip() for t in kv["types"].split(",") if t.strip()]
    types = {}
    for label in labels:
        model = kv.get(f"{label}.model", "poisson")
        try:
            if model == "poisson":
                types[label] = PoissonType(float(kv[f"{label}.intensity"]))
            elif model == "cluster":
                groups = tuple(int(g) for g in kv.get(f"{label}.groups", "1").split(","))
                types[label] = ClusterType(float(kv[f"{label}.parent-intensity"]),
                                           float(kv[f"{label}.mean-offspring"]),
                                           float(kv[f"{label}.sigma"]), groups)
            else:
                raise ValidationError(f"type {label!r}: unknown model {model!r}")
        except ValueError as e:
            raise ValidationError(f"type {label!r}: {e}") from None
    return SimSpec(types, int(kv.get("seed", "0")))


def read_sim_spec(path) -> SimSpec:
    return sim_spec_from_dict(read(path))


def dump_sim_spec(spec: SimSpec) -> str:
    out = io.StringIO()
    out.write(f"seed = {spec.seed}\n")
    out.write(f"types = {', '.join(spec.labels)}\n")
    for label, m in spec.types.items():
        if isinstance(m, PoissonType):
            out.write(f"{label}.model = poisson\n{label}.intensity = {m.intensity!r}\n")
        else:
            out.write(f"{label}.model = cluster\n"
                      f"{label}.parent-intensity = {m.parent_intensity!r}\n"
                      f"{label}.mean-offspring = {m.mean_offspring!r}\n"
                      f"{label}.sigma = {m.sigma!r}\n"
                      f"{label}.groups = {','.join(map(str, m.groups))}\n")
    return out.getvalue()
