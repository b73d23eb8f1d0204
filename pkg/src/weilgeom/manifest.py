"""Manifest files: sectioned key/value text describing charts, a map and points.

See ``docs/manifest.md`` for the normative format.  Every mathematical value is
an expression string; loading validates coverage of the metric's upper
triangle, parses all expressions and checks point arity.
"""

from __future__ import annotations

import configparser
import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .expr import ParseError, parse
from .morphism import SmoothMap
from .riemann import Jet2Scalar, Metric
from .scalars import DEFAULT_RTOL, EXACT, MODES, convert, parse_scalar

_SHORT_KEY = re.compile(r"^g([1-9])([1-9])$")
_LONG_KEY = re.compile(r"^g_(\d+)_(\d+)$")


class ManifestError(ValueError):
    """Malformed manifest; the CLI maps this to exit status 2."""


@dataclass(frozen=True)
class Chart:
    coords: tuple[str, ...]
    metric: Metric
    sources: Mapping[tuple[int, int], str]


@dataclass(frozen=True)
class Manifest:
    path: str
    digest: str
    domain: Chart
    codomain: Chart | None = None
    map: SmoothMap | None = None
    map_sources: tuple[str, ...] = ()
    points: tuple[tuple[str, tuple], ...] = ()  # exact coordinates
    functions: tuple[tuple[str, str], ...] = ()
    jet: dict | None = None
    mode: str = EXACT
    tol: float = DEFAULT_RTOL

    def points_in(self, mode: str | None = None) -> list[tuple[str, tuple]]:
        """Named points with coordinates in ``mode`` (default: the manifest's own)."""
        mode = mode or self.mode
        return [(name, tuple(convert(c, mode) for c in p)) for name, p in self.points]

    def jet_at(self, point: tuple, mode: str | None = None) -> Jet2Scalar:
        if self.jet is None:
            raise ManifestError("manifest has no [jet] section")
        n = len(point)
        mode = mode or self.mode
        val = convert(self.jet["value"], mode)
        cov = [convert(c, mode) for c in self.jet["covector"]]
        form = [[convert(c, mode) for c in row] for row in self.jet["form"]]
        if len(cov) != n or len(form) != n or any(len(r) != n for r in form):
            raise ManifestError(f"[jet] data does not have dimension {n}")
        try:
            return Jet2Scalar.make(point, val, cov, form, "jet")
        except ValueError as exc:
            raise ManifestError(f"[jet] {exc}") from None


def _split(text: str, sep: str = ",") -> list[str]:
    return [t.strip() for t in text.split(sep) if t.strip()]


def _entry_index(key: str, n: int) -> tuple[int, int] | None:
    m = _SHORT_KEY.match(key) or _LONG_KEY.match(key)
    if not m:
        return None
    i, j = int(m.group(1)), int(m.group(2))
    if not (1 <= i <= n and 1 <= j <= n):
        raise ManifestError(f"metric key {key!r} is out of range for dimension {n}")
    if i > j:
        raise ManifestError(f"metric key {key!r} is below the diagonal; give the upper triangle only")
    return i - 1, j - 1


def _chart(cp: configparser.ConfigParser, section: str) -> Chart:
    sec = cp[section]
    if "coords" not in sec:
        raise ManifestError(f"[{section}] needs a 'coords' key")
    coords = tuple(_split(sec["coords"]))
    if not coords or len(set(coords)) != len(coords):
        raise ManifestError(f"[{section}] coords must be distinct names")
    for c in coords:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", c):
            raise ManifestError(f"[{section}] invalid coordinate name {c!r}")
    n = len(coords)
    if "dim" in sec and sec["dim"].strip() != str(n):
        raise ManifestError(f"[{section}] dim = {sec['dim']} but {n} coordinates are given")
    entries = {}
    for key, val in sec.items():
        if key in ("coords", "dim"):
            continue
        idx = _entry_index(key, n)
        if idx is None:
            raise ManifestError(f"[{section}] unknown key {key!r}")
        if idx in entries:
            raise ManifestError(f"[{section}] metric entry {idx[0] + 1},{idx[1] + 1} given twice")
        entries[idx] = val
    missing = [f"g{i + 1}{j + 1}" if n < 10 else f"g_{i + 1}_{j + 1}"
               for i in range(n) for j in range(i, n) if (i, j) not in entries]
    if missing:
        raise ManifestError(f"[{section}] missing metric entries: {', '.join(missing)}")
    try:
        metric = Metric.from_strings(coords, entries)
    except ParseError as exc:
        raise ManifestError(f"[{section}] {exc}") from None
    except ValueError as exc:
        raise ManifestError(f"[{section}] {exc}") from None
    return Chart(coords, metric, entries)


def _numbers(text: str, mode: str, what: str) -> list:
    try:
        return [parse_scalar(t, mode) for t in _split(text)]
    except (ValueError, ZeroDivisionError) as exc:
        raise ManifestError(f"{what}: {exc}") from None


def loads(text: str, path: str = "<string>") -> Manifest:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str  # keep coordinate and point names case-sensitive
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        raise ManifestError(f"{path}: {exc}") from None
    known = {"domain", "codomain", "map", "points", "options", "functions", "jet"}
    unknown = [s for s in cp.sections() if s not in known]
    if unknown:
        raise ManifestError(f"unknown section(s): {', '.join(unknown)}")
    if not cp.has_section("domain"):
        raise ManifestError("manifest needs a [domain] section")

    opts = cp["options"] if cp.has_section("options") else {}
    mode = opts.get("mode", EXACT)
    if mode not in MODES:
        raise ManifestError(f"[options] mode must be one of {MODES}")
    try:
        tol = float(opts.get("tol", DEFAULT_RTOL))
    except ValueError:
        raise ManifestError("[options] tol must be a number") from None
    if not tol > 0:
        raise ManifestError("[options] tol must be positive")

    domain = _chart(cp, "domain")
    codomain = _chart(cp, "codomain") if cp.has_section("codomain") else None

    phi, sources = None, ()
    if cp.has_section("map"):
        if codomain is None:
            raise ManifestError("[map] requires a [codomain] section")
        keys = list(cp["map"].keys())
        expected = [f"f{i}" for i in range(1, len(keys) + 1)]
        if sorted(keys, key=lambda k: (len(k), k)) != expected:
            raise ManifestError(f"[map] keys must be f1..f{len(keys)}")
        sources = tuple(cp["map"][k] for k in expected)
        if len(sources) != len(codomain.coords):
            raise ManifestError(f"[map] has {len(sources)} components, codomain has "
                                f"{len(codomain.coords)} coordinates")
        try:
            phi = SmoothMap.from_strings(domain.coords, sources)
        except ParseError as exc:
            raise ManifestError(f"[map] {exc}") from None

    points = []
    if cp.has_section("points"):
        for name, val in cp["points"].items():
            p = _numbers(val, EXACT, f"[points] {name}")
            if len(p) != len(domain.coords):
                raise ManifestError(f"[points] {name} has {len(p)} coordinates, "
                                    f"domain has {len(domain.coords)}")
            points.append((name, tuple(p)))

    functions = []
    if cp.has_section("functions"):
        for name, val in cp["functions"].items():
            try:
                parse(val, domain.coords)
            except ParseError as exc:
                raise ManifestError(f"[functions] {name}: {exc}") from None
            functions.append((name, val))

    jet = None
    if cp.has_section("jet"):
        sec = cp["jet"]
        missing = {"value", "covector", "form"} - set(sec.keys())
        if missing:
            raise ManifestError(f"[jet] missing key(s): {', '.join(sorted(missing))}")
        jet = {
            "value": _numbers(sec["value"], EXACT, "[jet] value")[0],
            "covector": _numbers(sec["covector"], EXACT, "[jet] covector"),
            "form": [_numbers(row, EXACT, "[jet] form") for row in _split(sec["form"], ";")],
        }

    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return Manifest(path, digest, domain, codomain, phi, sources, tuple(points),
                    tuple(functions), jet, mode, tol)


def load(path: str | Path) -> Manifest:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read {p}: {exc.strerror}") from None
    return loads(text, str(p))
