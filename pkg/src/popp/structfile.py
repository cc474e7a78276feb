"""TOML structure files.

Example::

    name = "martinet"
    dimension = 3
    variables = ["x", "y", "z"]          # optional
    fields = [["1", "0", "y^2"], ["0", "1", "0"]]
    completion = [["0", "0", "1"]]       # optional, n - k extra frame fields
    points = [[0.0, 1.0, 0.0]]           # optional
    grid = "-1:1:5,0.5:2:4,0:0:1"        # optional, start:stop:count per axis

    [[maps]]                             # optional
    name = "flip"
    forward = ["x", "-y", "z"]
    inverse = ["x", "-y", "z"]
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import PolyParseError, ValidationError
from .flag import SRStructure
from .maps import PolyMap
from .polyvec import VectorField, default_names, parse_poly


@dataclass
class StructureFile:
    structure: SRStructure
    completion: list[VectorField] | None = None
    maps: list[PolyMap] = field(default_factory=list)
    points: list[tuple[float, ...]] = field(default_factory=list)
    grid: str | None = None

    @property
    def variables(self):
        return self.structure.variables


def _line_of(text: str, needle: str) -> int | None:
    quoted = json.dumps(needle)
    for i, line in enumerate(text.splitlines(), start=1):
        if quoted in line or f"'{needle}'" in line:
            return i
    return None


def _where(text, needle):
    line = _line_of(text, needle) if text else None
    return f" (line {line})" if line else ""


def _parse_field(raw, n, names, label, text):
    if not isinstance(raw, list) or len(raw) != n:
        raise ValidationError(f"{label}: expected a list of {n} component strings")
    comps = []
    for c, entry in enumerate(raw, start=1):
        try:
            comps.append(parse_poly(entry, n, names))
        except PolyParseError as exc:
            raise PolyParseError(
                f"{label}, component {c}{_where(text, str(entry))}: {exc}") from None
    return VectorField(comps)


def parse_grid(spec: str, n: int) -> np.ndarray:
    """``"a:b:c,..."`` -> inclusive tensor grid of points, shape ``(N, n)``."""
    axes = []
    parts = [p.strip() for p in spec.split(",")]
    if len(parts) != n:
        raise ValidationError(f"grid {spec!r} has {len(parts)} axes, need {n}")
    for part in parts:
        try:
            start, stop, count = part.split(":")
            start, stop, count = float(start), float(stop), int(count)
        except ValueError:
            raise ValidationError(f"bad grid axis {part!r}; use start:stop:count") from None
        if count < 1:
            raise ValidationError(f"grid axis {part!r} needs a positive count")
        axes.append(np.linspace(start, stop, count))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def loads(text: str) -> StructureFile:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"invalid structure file: {exc}") from None
    try:
        n = int(data["dimension"])
        raw_fields = data["fields"]
    except KeyError as exc:
        raise ValidationError(f"structure file is missing {exc.args[0]!r}") from None
    names = data.get("variables")
    if names is not None and len(names) != n:
        raise ValidationError(f"{len(names)} variable names for dimension {n}")
    fields = [_parse_field(raw, n, names, f"field {i}", text)
              for i, raw in enumerate(raw_fields, start=1)]
    s = SRStructure(fields, name=data.get("name", ""), variables=names)
    completion = None
    if "completion" in data:
        completion = [_parse_field(raw, n, names, f"completion field {i}", text)
                      for i, raw in enumerate(data["completion"], start=1)]
        if len(completion) != n - s.rank:
            raise ValidationError(
                f"completion has {len(completion)} fields, need {n - s.rank}")
    maps = []
    for i, m in enumerate(data.get("maps", []), start=1):
        label = f"map {i} ({m.get('name', '')})"
        try:
            fwd = [parse_poly(p, n, names) for p in m["forward"]]
            inv = [parse_poly(p, n, names) for p in m["inverse"]]
        except KeyError as exc:
            raise ValidationError(f"{label}: missing {exc.args[0]!r}") from None
        except PolyParseError as exc:
            raise PolyParseError(f"{label}: {exc}") from None
        if len(fwd) != n or len(inv) != n:
            raise ValidationError(f"{label}: forward and inverse need {n} components")
        maps.append(PolyMap(fwd, inv, name=m.get("name", f"map{i}")))
    points = []
    for p in data.get("points", []):
        if len(p) != n:
            raise ValidationError(f"point {p} has {len(p)} coordinates, need {n}")
        points.append(tuple(float(v) for v in p))
    grid = data.get("grid")
    if grid is not None:
        parse_grid(grid, n)
    return StructureFile(s, completion, maps, points, grid)


def load(path) -> StructureFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    return loads(text)


def _str_list(items):
    return "[" + ", ".join(json.dumps(s) for s in items) + "]"


def dumps(sf: StructureFile) -> str:
    """Serialize to TOML; ``loads(dumps(sf))`` reproduces the structure exactly."""
    s = sf.structure
    names = list(s.variables) if s.variables else None
    render = names or default_names(s.nvars)
    lines = []
    if s.name:
        lines.append(f"name = {json.dumps(s.name)}")
    lines.append(f"dimension = {s.nvars}")
    if names:
        lines.append(f"variables = {_str_list(names)}")
    lines.append("fields = [")
    lines += [f"  {_str_list(X.to_strings(render))}," for X in s.fields]
    lines.append("]")
    if sf.completion:
        lines.append("completion = [")
        lines += [f"  {_str_list(X.to_strings(render))}," for X in sf.completion]
        lines.append("]")
    if sf.points:
        lines.append("points = [" + ", ".join(
            "[" + ", ".join(repr(float(v)) for v in p) + "]" for p in sf.points) + "]")
    if sf.grid:
        lines.append(f"grid = {json.dumps(sf.grid)}")
    for m in sf.maps:
        lines += ["", "[[maps]]", f"name = {json.dumps(m.name)}",
                  f"forward = {_str_list(p.to_string(render) for p in m.forward)}",
                  f"inverse = {_str_list(p.to_string(render) for p in m.inverse)}"]
    return "\n".join(lines) + "\n"
