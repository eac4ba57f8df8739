"""Reader/writer for the plain-text geometry document format.

A document holds named entities.  The format is line based::

    nurbskit 1

    curve <name>
    dim 3
    degree 2
    knots 0 0 0 1 1 1
    point <x> <y> <z> <w>
    ...
    end

    surface <name>          (trim <name> is the same block with dim 2;
    dim 3                    it loads as a validated trim map)
    degree <p_xi> <p_eta>
    knots_xi ...
    knots_eta ...
    shape <n_xi> <n_eta>
    point <x> <y> <z> <w>   row-major: the xi index varies slowest
    ...
    end

    trimmed <name>
    base <surface entity>
    map <trim entity>
    end

    points <name>
    dim 3
    point <x> <y> <z>
    ...
    end

Numbers are decimal with up to 17 significant digits, so save -> load ->
save reproduces files byte for byte.  Blank lines and ``#`` comments are
accepted on input and not preserved.  Knot vectors are normalized to
[0, 1] at load, like everywhere else in the package.
"""

import re

import numpy as np

from .basis import BasisSpec, KnotVector
from .errors import (
    DocumentParseError,
    DocumentValidationError,
    NurbsError,
)
from .geometry import NurbsCurve, NurbsSurface, TrimMap, TrimmedSurface

__all__ = ["GeometryDocument", "load", "loads", "save", "dumps"]

HEADER = "nurbskit 1"

_NAME_RE = re.compile(r"[A-Za-z0-9_.:-]+")

#: entity keyword -> block field names, in canonical output order
_BLOCK_FIELDS = {
    "curve": ("dim", "degree", "knots"),
    "surface": ("dim", "degree", "knots_xi", "knots_eta", "shape"),
    "trim": ("dim", "degree", "knots_xi", "knots_eta", "shape"),
    "trimmed": ("base", "map"),
    "points": ("dim",),
}


class GeometryDocument:
    """A named, ordered collection of geometry entities.

    Values are :class:`NurbsCurve`, :class:`NurbsSurface`,
    :class:`TrimMap`, :class:`TrimmedSurface` or ``(m, d)`` point arrays.
    """

    _TYPES = (NurbsCurve, NurbsSurface, TrimMap, TrimmedSurface, np.ndarray)

    def __init__(self):
        self.entities = {}

    def add(self, name, entity):
        if not _NAME_RE.fullmatch(name):
            raise DocumentValidationError(
                "names may only use letters, digits and ._:-", entity=name
            )
        if name in self.entities:
            raise DocumentValidationError("duplicate entity name", entity=name)
        if not isinstance(entity, self._TYPES):
            raise DocumentValidationError(
                f"unsupported entity type {type(entity).__name__}", entity=name
            )
        if isinstance(entity, np.ndarray):
            entity = np.array(entity, dtype=np.float64)
            if entity.ndim != 2 or entity.shape[1] not in (2, 3):
                raise DocumentValidationError(
                    "a point set must be an (m, 2|3) array", entity=name
                )
            entity.flags.writeable = False
        self.entities[name] = entity
        return entity

    def get(self, name, kind=None):
        """Look up an entity, optionally constraining its type."""
        try:
            entity = self.entities[name]
        except KeyError:
            raise DocumentValidationError("no such entity", entity=name) from None
        if kind is not None and not isinstance(entity, kind):
            wanted = getattr(kind, "__name__", str(kind))
            raise DocumentValidationError(
                f"expected {wanted}, found {type(entity).__name__}", entity=name
            )
        return entity

    def name_of(self, entity):
        for name, value in self.entities.items():
            if value is entity:
                return name
        return None

    def __contains__(self, name):
        return name in self.entities

    def __len__(self):
        return len(self.entities)


def _fmt(x):
    return "%.17g" % x


def _floats(values):
    return " ".join(_fmt(v) for v in values)


class _Parser:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.num = 0

    def error(self, message):
        raise DocumentParseError(message, line=self.num)

    def next_tokens(self):
        """The next non-blank, non-comment line split into tokens, or None."""
        while self.num < len(self.lines):
            raw = self.lines[self.num]
            self.num += 1
            stripped = raw.split("#", 1)[0].strip()
            if stripped:
                return stripped.split()
        return None

    def parse(self):
        header = self.next_tokens()
        if header is None or " ".join(header) != HEADER:
            self.error(f"expected header '{HEADER}'")
        blocks = []
        while True:
            tokens = self.next_tokens()
            if tokens is None:
                break
            blocks.append(self.parse_block(tokens))
        return blocks

    def parse_block(self, start):
        if start[0] not in _BLOCK_FIELDS:
            self.error(f"unknown entity type '{start[0]}'")
        if len(start) != 2:
            self.error(f"expected '{start[0]} <name>'")
        kind, name = start
        if not _NAME_RE.fullmatch(name):
            self.error(f"invalid entity name '{name}'")
        fields = {}
        points = []
        start_line = self.num
        while True:
            tokens = self.next_tokens()
            if tokens is None:
                self.num = start_line
                self.error(f"'{kind} {name}' is missing its 'end' line")
            key, rest = tokens[0], tokens[1:]
            if key == "end":
                if rest:
                    self.error("'end' takes no arguments")
                return kind, name, fields, points
            if key == "point":
                points.append((self.num, self.number_list(rest)))
            elif key in _BLOCK_FIELDS[kind]:
                if key in fields:
                    self.error(f"duplicate field '{key}'")
                if key in ("base", "map"):
                    if len(rest) != 1 or not _NAME_RE.fullmatch(rest[0]):
                        self.error(f"'{key}' expects one entity name")
                    fields[key] = rest[0]
                elif key in ("dim", "degree", "shape"):
                    fields[key] = self.int_list(rest)
                else:
                    fields[key] = self.number_list(rest)
            else:
                self.error(f"unknown field '{key}' in a '{kind}' block")

    def number_list(self, tokens):
        if not tokens:
            self.error("expected at least one number")
        out = []
        for tok in tokens:
            try:
                out.append(float(tok))
            except ValueError:
                self.error(f"'{tok}' is not a number")
        return out

    def int_list(self, tokens):
        out = []
        for tok in tokens:
            try:
                out.append(int(tok))
            except ValueError:
                self.error(f"'{tok}' is not an integer")
        return out


def _require(fields, name, key, count=None):
    if key not in fields:
        raise DocumentValidationError(f"missing required field '{key}'", entity=name)
    value = fields[key]
    if count is not None and len(value) != count:
        raise DocumentValidationError(
            f"field '{key}' expects {count} value(s), got {len(value)}", entity=name
        )
    return value


def _point_array(name, points, width):
    arr = np.empty((len(points), width))
    for row, (line, values) in enumerate(points):
        if len(values) != width:
            raise DocumentParseError(
                f"point expects {width} values, got {len(values)}", line=line
            )
        arr[row] = values
    return arr


def _split_weights(arr):
    """Split a coords+weight array; all-unit weights become None."""
    coords, w = arr[:, :-1], arr[:, -1]
    return coords, (None if np.all(w == 1.0) else w)


def _build_curve(name, fields, points):
    dim = _require(fields, name, "dim", 1)[0]
    if dim not in (2, 3):
        raise DocumentValidationError("curve dim must be 2 or 3", entity=name)
    degree = _require(fields, name, "degree", 1)[0]
    knots = _require(fields, name, "knots")
    if not points:
        raise DocumentValidationError("curve has no control points", entity=name)
    coords, weights = _split_weights(_point_array(name, points, dim + 1))
    try:
        basis = BasisSpec(KnotVector(knots), degree, weights)
        return NurbsCurve(basis, coords)
    except NurbsError as exc:
        raise DocumentValidationError(str(exc), entity=name) from exc


def _build_surface(name, kind, fields, points):
    dim = _require(fields, name, "dim", 1)[0]
    expected_dim = (2,) if kind == "trim" else (2, 3)
    if dim not in expected_dim:
        raise DocumentValidationError(
            f"{kind} dim must be {' or '.join(map(str, expected_dim))}", entity=name
        )
    deg = _require(fields, name, "degree", 2)
    kx = _require(fields, name, "knots_xi")
    ke = _require(fields, name, "knots_eta")
    n_xi, n_eta = _require(fields, name, "shape", 2)
    if len(points) != n_xi * n_eta:
        raise DocumentValidationError(
            f"shape {n_xi} x {n_eta} needs {n_xi * n_eta} points, got {len(points)}",
            entity=name,
        )
    coords, weights = _split_weights(_point_array(name, points, dim + 1))
    try:
        surface = NurbsSurface(
            KnotVector(kx),
            deg[0],
            KnotVector(ke),
            deg[1],
            coords.reshape(n_xi, n_eta, dim),
            None if weights is None else weights.reshape(n_xi, n_eta),
        )
        return TrimMap(surface) if kind == "trim" else surface
    except NurbsError as exc:
        raise DocumentValidationError(str(exc), entity=name) from exc


def _build_points(name, fields, points):
    dim = _require(fields, name, "dim", 1)[0]
    if dim not in (2, 3):
        raise DocumentValidationError("points dim must be 2 or 3", entity=name)
    if not points:
        raise DocumentValidationError("point set is empty", entity=name)
    return _point_array(name, points, dim)


def loads(text):
    blocks = _Parser(text).parse()
    doc = GeometryDocument()
    deferred = []
    for kind, name, fields, points in blocks:
        if name in doc:
            raise DocumentValidationError("duplicate entity name", entity=name)
        if kind == "curve":
            doc.add(name, _build_curve(name, fields, points))
        elif kind in ("surface", "trim"):
            doc.add(name, _build_surface(name, kind, fields, points))
        elif kind == "points":
            doc.add(name, _build_points(name, fields, points))
        else:
            if points:
                raise DocumentValidationError(
                    "a trimmed block carries no point lines", entity=name
                )
            deferred.append((name, fields))
            doc.entities[name] = None  # hold the slot in order
    for name, fields in deferred:
        base = doc.get(_require(fields, name, "base", None), NurbsSurface)
        trim = doc.get(_require(fields, name, "map", None), TrimMap)
        try:
            doc.entities[name] = TrimmedSurface(base, trim)
        except NurbsError as exc:
            raise DocumentValidationError(str(exc), entity=name) from exc
    return doc


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def _emit_curve(out, name, curve):
    out.append(f"curve {name}")
    out.append(f"dim {curve.dim}")
    out.append(f"degree {curve.degree}")
    out.append(f"knots {_floats(curve.basis.knots.values)}")
    weights = curve.basis.weights_or_ones()
    for cp, w in zip(curve.control_points, weights):
        out.append(f"point {_floats(cp)} {_fmt(w)}")


def _emit_surface(out, name, kind, surface):
    out.append(f"{kind} {name}")
    out.append(f"dim {surface.dim}")
    out.append(f"degree {surface.degree_xi} {surface.degree_eta}")
    out.append(f"knots_xi {_floats(surface.basis_xi.knots.values)}")
    out.append(f"knots_eta {_floats(surface.basis_eta.knots.values)}")
    n_xi, n_eta = surface.points.shape[:2]
    out.append(f"shape {n_xi} {n_eta}")
    for i in range(n_xi):
        for j in range(n_eta):
            out.append(f"point {_floats(surface.points[i, j])} {_fmt(surface.weights[i, j])}")


def _emit_trimmed(out, doc, name, entity):
    base = doc.name_of(entity.base)
    trim = doc.name_of(entity.trim)
    if base is None or trim is None:
        raise DocumentValidationError(
            "trimmed entity references a surface or trim map that is not in "
            "the document",
            entity=name,
        )
    out.append(f"trimmed {name}")
    out.append(f"base {base}")
    out.append(f"map {trim}")


def _emit_points(out, name, arr):
    out.append(f"points {name}")
    out.append(f"dim {arr.shape[1]}")
    for row in arr:
        out.append(f"point {_floats(row)}")


def dumps(doc):
    out = [HEADER]
    for name, entity in doc.entities.items():
        out.append("")
        if isinstance(entity, NurbsCurve):
            _emit_curve(out, name, entity)
        elif isinstance(entity, TrimMap):
            _emit_surface(out, name, "trim", entity.surface)
        elif isinstance(entity, NurbsSurface):
            _emit_surface(out, name, "surface", entity)
        elif isinstance(entity, TrimmedSurface):
            _emit_trimmed(out, doc, name, entity)
        elif isinstance(entity, np.ndarray):
            _emit_points(out, name, entity)
        else:  # pragma: no cover - add() blocks foreign types
            raise DocumentValidationError(
                f"cannot serialize {type(entity).__name__}", entity=name
            )
        out.append("end")
    out.append("")
    return "\n".join(out)


def save(doc, path):
    text = dumps(doc)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
