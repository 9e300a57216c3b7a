"""Run configuration, seeded test data and file formats.

File formats (all text, floats written with 17 significant digits):

* tree function, JSON::

      {"format": "tree-function", "q": 2, "R": 4,
       "values": {"0": [re, im], "1": [re, im], ...}}

  Missing vertices are zero.

* nuclear decomposition, JSON::

      {"format": "nuclear-decomposition", "q": 2, "R": 4,
       "pairs": [{"f": {...}, "g": {...}}, ...]}

  where ``f`` and ``g`` are ``values`` maps as above.

* kernel matrix, CSV: a ``# q=..,R=..,D=..,M=..`` line, the header
  ``row,col,re,im`` and one line per entry in row-major order.

* spectral function, CSV: the same comment line, the header
  ``cylinder,node,s,re,im`` and one line per grid point, cylinder-major.

Random test data come from numpy's PCG64 generator.  The stream for a named
purpose is seeded by ``SeedSequence(seed, spawn_key=(crc32(name),))`` and a
batch of ``n`` complex functions on ``N`` vertices is drawn as
``standard_normal((n, N, 2))`` with real parts in ``[..., 0]``.
"""
import csv
import io as _io
import json
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .psdo import NuclearDecomposition

__all__ = [
    "ConfigError",
    "FormatError",
    "RunConfig",
    "generator",
    "random_functions",
    "random_decomposition",
    "fmt_float",
    "dumps",
    "write_tree_function",
    "read_tree_function",
    "write_decomposition",
    "read_decomposition",
    "write_kernel",
    "read_kernel",
    "write_spectral",
    "read_spectral",
]


class ConfigError(ValueError):
    """Invalid run configuration."""


class FormatError(ValueError):
    """Malformed or mismatched data file."""


@dataclass
class RunConfig:
    """Parameters of a run.

    ``D`` defaults to ``R``; ``tolerances`` overrides per-check tolerances by
    check name.
    """

    q: int = 2
    R: int = 4
    D: int | None = None
    M: int = 256
    seed: int = 42
    tolerances: dict = field(default_factory=dict)
    out: str = "reports"

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("q", "R", "M", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ConfigError(f"{name} must be an integer, got {v!r}")
        if self.D is None:
            self.D = self.R
        if self.q < 2:
            raise ConfigError(f"q must be >= 2, got {self.q}")
        if self.R < 0:
            raise ConfigError(f"R must be >= 0, got {self.R}")
        if self.D != self.R:
            # cylinders are ball vertices (D <= R) and must resolve every height (D >= R)
            raise ConfigError(f"D must equal R={self.R} for transforms on the ball, got {self.D}")
        if self.R < 1:
            raise ConfigError("R must be >= 1 so that the boundary has cylinders")
        if self.M < 2:
            raise ConfigError(f"M must be >= 2, got {self.M}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        for k, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v >= 0):
                raise ConfigError(f"tolerance {k} must be a non-negative number, got {v!r}")

    def tol(self, name, default):
        return float(self.tolerances.get(name, default))

    @property
    def header(self):
        return f"# q={self.q},R={self.R},D={self.D},M={self.M}"

    @classmethod
    def from_text(cls, text, **overrides):
        """Parse ``key=value`` lines; ``tol.<check>=x`` sets a tolerance."""
        kw = {"tolerances": {}}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            _set_key(kw, key, value)
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "tolerances":
                kw["tolerances"].update(value)
            else:
                kw[key] = value
        return cls(**kw)

    @classmethod
    def from_file(cls, path, **overrides):
        return cls.from_text(Path(path).read_text(), **overrides)


_INT_KEYS = {"q", "R", "D", "M", "seed"}


def _set_key(kw, key, value):
    if key.startswith("tol."):
        try:
            kw["tolerances"][key[4:]] = float(value)
        except ValueError:
            raise ConfigError(f"tolerance {key} is not a number: {value!r}") from None
    elif key in _INT_KEYS:
        try:
            kw[key] = int(value)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    elif key == "out":
        kw["out"] = value
    else:
        known = sorted(_INT_KEYS | {"out"}) + ["tol.<check>"]
        raise ConfigError(f"unknown config key {key!r}; known keys: {', '.join(known)}")


# -- seeded data -------------------------------------------------------------

def generator(seed, name=""):
    """PCG64 generator for the stream ``name`` under ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(name.encode()),))
    return np.random.Generator(np.random.PCG64(ss))


def random_functions(rng, n, n_vertices):
    z = rng.standard_normal((n, n_vertices, 2))
    return z[..., 0] + 1j * z[..., 1]


def random_decomposition(rng, n_terms, n_vertices):
    f = random_functions(rng, n_terms, n_vertices)
    g = random_functions(rng, n_terms, n_vertices)
    return NuclearDecomposition(f, g)


# -- serialization -----------------------------------------------------------

def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj):
    """Deterministic compact JSON with sorted keys and 17-digit floats."""
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(json.dumps(k) + ":" + dumps(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return "[" + fmt_float(obj.real) + "," + fmt_float(obj.imag) + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _values_map(f):
    return {str(i): [float(v.real), float(v.imag)] for i, v in enumerate(np.asarray(f, dtype=complex))}


def _values_array(values, n):
    out = np.zeros(n, dtype=complex)
    if not isinstance(values, dict):
        raise FormatError("values must be a map from vertex index to [re, im]")
    for key, pair in values.items():
        try:
            i = int(key)
            re, im = pair
        except (TypeError, ValueError):
            raise FormatError(f"bad entry {key!r}: {pair!r}") from None
        if not 0 <= i < n:
            raise FormatError(f"vertex index {i} outside a ball of {n} vertices")
        out[i] = complex(float(re), float(im))
    return out


def _load_json(path, kind):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or doc.get("format") != kind:
        raise FormatError(f"{path}: expected a {kind!r} document")
    return doc


def _check_dims(doc, q, R, path):
    if (doc.get("q"), doc.get("R")) != (q, R):
        raise FormatError(f"{path}: file has q={doc.get('q')}, R={doc.get('R')}; "
                          f"configuration has q={q}, R={R}")


def write_tree_function(path, f, q, R):
    doc = {"format": "tree-function", "q": q, "R": R, "values": _values_map(f)}
    Path(path).write_text(dumps(doc) + "\n")


def read_tree_function(path, q, R, n_vertices):
    doc = _load_json(path, "tree-function")
    _check_dims(doc, q, R, path)
    return _values_array(doc.get("values"), n_vertices)


def write_decomposition(path, dec, q, R):
    pairs = [{"f": _values_map(f), "g": _values_map(g)} for f, g in zip(dec.f, dec.g)]
    doc = {"format": "nuclear-decomposition", "q": q, "R": R, "pairs": pairs}
    Path(path).write_text(dumps(doc) + "\n")


def read_decomposition(path, q, R, n_vertices):
    doc = _load_json(path, "nuclear-decomposition")
    _check_dims(doc, q, R, path)
    pairs = doc.get("pairs")
    if not isinstance(pairs, list):
        raise FormatError(f"{path}: 'pairs' must be a list")
    out = []
    for k, pair in enumerate(pairs):
        if not isinstance(pair, dict) or "f" not in pair or "g" not in pair:
            raise FormatError(f"{path}: pair {k} needs 'f' and 'g'")
        out.append((_values_array(pair["f"], n_vertices), _values_array(pair["g"], n_vertices)))
    return NuclearDecomposition.from_pairs(out, n_vertices)


def _write_csv(path, header, columns, rows):
    buf = _io.StringIO()
    buf.write(header + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(row)
    Path(path).write_text(buf.getvalue())


def _read_csv(path, header, columns):
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != header:
        got = lines[0] if lines else "<empty>"
        raise FormatError(f"{path}: header {got!r} does not match configuration {header!r}")
    rows = list(csv.reader(lines[1:]))
    if not rows or rows[0] != columns:
        raise FormatError(f"{path}: expected columns {columns}")
    return rows[1:]


def write_kernel(path, K, config):
    K = np.asarray(K, dtype=complex)
    rows = ((i, j, fmt_float(K[i, j].real), fmt_float(K[i, j].imag))
            for i in range(K.shape[0]) for j in range(K.shape[1]))
    _write_csv(path, config.header, ["row", "col", "re", "im"], rows)


def read_kernel(path, config, n_vertices):
    rows = _read_csv(path, config.header, ["row", "col", "re", "im"])
    K = np.zeros((n_vertices, n_vertices), dtype=complex)
    try:
        for i, j, re, im in rows:
            K[int(i), int(j)] = complex(float(re), float(im))
    except (ValueError, IndexError):
        raise FormatError(f"{path}: malformed kernel entry") from None
    if len(rows) != n_vertices**2:
        raise FormatError(f"{path}: expected {n_vertices**2} entries, got {len(rows)}")
    return K


def write_spectral(path, F, grid, config):
    F = np.asarray(F, dtype=complex)
    rows = ((c, m, fmt_float(grid.nodes[m]), fmt_float(F[c, m].real), fmt_float(F[c, m].imag))
            for c in range(F.shape[0]) for m in range(F.shape[1]))
    _write_csv(path, config.header, ["cylinder", "node", "s", "re", "im"], rows)


def read_spectral(path, config, n_cylinders):
    rows = _read_csv(path, config.header, ["cylinder", "node", "s", "re", "im"])
    F = np.zeros((n_cylinders, config.M), dtype=complex)
    try:
        for c, m, _, re, im in rows:
            F[int(c), int(m)] = complex(float(re), float(im))
    except (ValueError, IndexError):
        raise FormatError(f"{path}: malformed spectral entry") from None
    if len(rows) != F.size:
        raise FormatError(f"{path}: expected {F.size} entries, got {len(rows)}")
    return F

