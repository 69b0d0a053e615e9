"""YAML job files describing a voltage graph over Z_p x G.

Schema (``format_version: 1``)::

    format_version: 1
    group:
      p: 2                      # prime
      g_factors: [2]            # orders of the cyclic factors of G, powers of p
    graph:
      vertices: [v1, v2, v3]
      edges:                    # one orientation per unoriented edge
        - name: e1              # optional, defaults to e<index>
          src: v1
          tgt: v2
          voltage: {zp: 1, g: [1]}          # optional, identity if absent
          reverse_voltage: {zp: -1, g: [1]} # optional; must be the negative
    inertia:                    # optional; unlisted vertices get trivial inertia
      v1:
        - {zp: "p^0", g: [0]}   # zp is "0" or "p^k"
    task:                       # optional
      n_max: 4
      quotient: full            # full | base
      output_dir: out

Problems are collected as :class:`Diagnostic` records with a field path
and, where available, a line number; :func:`parse_jobspec` raises
:class:`JobSpecError` carrying all of them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .graphs import Graph
from .groups import InertiaGenerator, ProfiniteSpec, SubgroupSpec, is_prime
from .voltage import VoltageGraph

__all__ = [
    "FORMAT_VERSION",
    "Diagnostic",
    "JobSpecError",
    "JobSpec",
    "parse_jobspec",
    "load_jobspec",
    "shipped_job",
]

FORMAT_VERSION = 1

YAML_SYNTAX = "E100"
SCHEMA = "E101"
BAD_VERSION = "E102"
NOT_PRIME = "E103"
BAD_P_POWER = "E104"
DANGLING = "E105"
INVOLUTION = "E106"
EMPTY_GRAPH = "E107"
DUPLICATE = "E108"
BAD_COORDS = "E109"

_P_POWER = re.compile(r"^\s*p\s*\^\s*(\d+)\s*$")


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    path: str = ""
    line: int | None = None

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        at = f" [{self.path}]" if self.path else ""
        return f"{self.code} {where}{self.message}{at}"


class JobSpecError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class JobSpec:
    voltage: VoltageGraph
    edge_names: tuple[str, ...]
    n_max: int = 4
    quotient: str = "full"
    output_dir: str | None = None
    format_version: int = FORMAT_VERSION
    source: str | None = field(default=None, compare=False)

    @property
    def base(self) -> Graph:
        return self.voltage.base

    @property
    def spec(self) -> ProfiniteSpec:
        return self.voltage.spec


def _index_lines(node, path=(), out=None):
    if out is None:
        out = {}
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            _index_lines(v, path + (k.value,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _index_lines(v, path + (i,), out)
    return out


def _fmt_path(path) -> str:
    s = ""
    for part in path:
        s += f"[{part}]" if isinstance(part, int) else (f".{part}" if s else str(part))
    return s


class _Parser:
    def __init__(self, lines):
        self.lines = lines
        self.diags: list[Diagnostic] = []

    def err(self, code, message, path=()):
        line = None
        for cut in range(len(path), -1, -1):
            if tuple(path[:cut]) in self.lines:
                line = self.lines[tuple(path[:cut])]
                break
        self.diags.append(Diagnostic(code, message, _fmt_path(path), line))

    def expect(self, value, kind, path, what):
        if kind is int and isinstance(value, bool):
            ok = False
        else:
            ok = isinstance(value, kind)
        if not ok:
            self.err(SCHEMA, f"{what} must be {getattr(kind, '__name__', kind)}", path)
        return ok


def _coords(parser, raw, k, path):
    if raw is None:
        return (0,) * k
    if not isinstance(raw, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in raw):
        parser.err(SCHEMA, "g must be a list of integers", path)
        return None
    if len(raw) != k:
        parser.err(BAD_COORDS, f"g has {len(raw)} coordinates but G has {k} factors", path)
        return None
    return tuple(raw)


def _voltage(parser, spec, raw, path):
    if raw is None:
        return spec.zero()
    if not isinstance(raw, dict):
        parser.err(SCHEMA, "voltage must be a mapping with keys zp and g", path)
        return None
    unknown = set(raw) - {"zp", "g"}
    if unknown:
        parser.err(SCHEMA, f"unknown voltage keys {sorted(unknown)}", path)
    zp = raw.get("zp", 0)
    if not parser.expect(zp, int, path + ("zp",), "zp"):
        return None
    g = _coords(parser, raw.get("g"), len(spec.g_factors), path + ("g",))
    if g is None:
        return None
    return spec.element(zp, g)


def _inertia_generator(parser, spec, raw, path):
    if not isinstance(raw, dict):
        parser.err(SCHEMA, "inertia generator must be a mapping with keys zp and g", path)
        return None
    zp = raw.get("zp", "0")
    if zp == 0 or zp == "0":
        power = None
    else:
        m = _P_POWER.match(zp) if isinstance(zp, str) else None
        if not m:
            parser.err(BAD_P_POWER, f"zp must be \"0\" or \"p^k\", got {zp!r}", path + ("zp",))
            return None
        power = int(m.group(1))
    g = _coords(parser, raw.get("g"), len(spec.g_factors), path + ("g",))
    if g is None:
        return None
    return InertiaGenerator(power, g)


def parse_jobspec(document: str, source: str | None = None) -> JobSpec:
    try:
        node = yaml.compose(document, Loader=yaml.SafeLoader)
        data = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise JobSpecError([Diagnostic(
            YAML_SYNTAX, f"not valid YAML: {getattr(exc, 'problem', exc)}",
            line=mark.line + 1 if mark else None)]) from None
    P = _Parser(_index_lines(node) if node is not None else {})
    if not isinstance(data, dict):
        P.err(SCHEMA, "document must be a mapping")
        raise JobSpecError(P.diags)

    unknown = set(data) - {"format_version", "group", "graph", "inertia", "task"}
    if unknown:
        P.err(SCHEMA, f"unknown top-level keys {sorted(unknown)}")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        P.err(BAD_VERSION, f"format_version must be {FORMAT_VERSION}, got {version!r}", ("format_version",))

    # group
    group = data.get("group")
    spec = None
    if not isinstance(group, dict):
        P.err(SCHEMA, "group must be a mapping with keys p and g_factors", ("group",))
    else:
        p = group.get("p")
        factors = group.get("g_factors", [])
        ok = P.expect(p, int, ("group", "p"), "p")
        if ok and not is_prime(p):
            P.err(NOT_PRIME, f"p = {p} is not prime", ("group", "p"))
            ok = False
        if not isinstance(factors, list) or not all(
                isinstance(q, int) and not isinstance(q, bool) for q in factors):
            P.err(SCHEMA, "g_factors must be a list of integers", ("group", "g_factors"))
            ok = False
        elif ok:
            for i, q in enumerate(factors):
                e, r = 0, q
                while r > 1 and r % p == 0:
                    r //= p
                    e += 1
                if r != 1 or e < 1:
                    P.err(BAD_P_POWER, f"G factor {q} is not a positive power of {p}",
                          ("group", "g_factors", i))
                    ok = False
        if ok:
            spec = ProfiniteSpec(p, tuple(factors))

    # graph
    graph = data.get("graph")
    vertices, edges = [], []
    if not isinstance(graph, dict):
        P.err(SCHEMA, "graph must be a mapping with keys vertices and edges", ("graph",))
    else:
        vertices = graph.get("vertices") or []
        edges = graph.get("edges") or []
        if not isinstance(vertices, list):
            P.err(SCHEMA, "vertices must be a list", ("graph", "vertices"))
            vertices = []
        if not isinstance(edges, list):
            P.err(SCHEMA, "edges must be a list", ("graph", "edges"))
            edges = []
    vertices = [str(v) for v in vertices]
    if not vertices:
        P.err(EMPTY_GRAPH, "empty graph: no vertices", ("graph", "vertices"))
    seen = set()
    for i, v in enumerate(vertices):
        if v in seen:
            P.err(DUPLICATE, f"duplicate vertex {v!r}", ("graph", "vertices", i))
        seen.add(v)
    vpos = {v: i for i, v in enumerate(vertices)}

    pairs, names, volts = [], [], {}
    for i, raw in enumerate(edges):
        path = ("graph", "edges", i)
        if not isinstance(raw, dict):
            P.err(SCHEMA, "edge must be a mapping", path)
            continue
        unknown = set(raw) - {"name", "src", "tgt", "voltage", "reverse_voltage"}
        if unknown:
            P.err(SCHEMA, f"unknown edge keys {sorted(unknown)}", path)
        name = str(raw.get("name", f"e{i + 1}"))
        if name in names:
            P.err(DUPLICATE, f"duplicate edge name {name!r}", path + ("name",))
        ends = []
        for key in ("src", "tgt"):
            ref = raw.get(key)
            if ref is None:
                P.err(SCHEMA, f"edge is missing {key}", path)
            elif str(ref) not in vpos:
                P.err(DANGLING, f"{key} refers to unknown vertex {ref!r}", path + (key,))
            else:
                ends.append(vpos[str(ref)])
        if len(ends) != 2:
            continue
        idx = len(pairs)
        pairs.append(tuple(ends))
        names.append(name)
        if spec is not None:
            x = _voltage(P, spec, raw.get("voltage"), path + ("voltage",))
            if x is not None:
                volts[2 * idx] = x
                if "reverse_voltage" in raw:
                    y = _voltage(P, spec, raw["reverse_voltage"], path + ("reverse_voltage",))
                    if y is not None and spec.add(x, y) != spec.zero():
                        P.err(INVOLUTION,
                              f"voltage involution violated on edge {name!r}: "
                              "reverse_voltage is not the negative of voltage",
                              path + ("reverse_voltage",))

    inertia_raw = data.get("inertia") or {}
    inertia = [SubgroupSpec.trivial() for _ in vertices]
    if not isinstance(inertia_raw, dict):
        P.err(SCHEMA, "inertia must map vertex names to generator lists", ("inertia",))
    elif spec is not None:
        for vname, gens in inertia_raw.items():
            path = ("inertia", vname)
            if str(vname) not in vpos:
                P.err(DANGLING, f"inertia given for unknown vertex {vname!r}", path)
                continue
            if not isinstance(gens, list):
                P.err(SCHEMA, "inertia entry must be a list of generators", path)
                continue
            parsed = [_inertia_generator(P, spec, g, path + (j,)) for j, g in enumerate(gens)]
            if all(g is not None for g in parsed):
                inertia[vpos[str(vname)]] = SubgroupSpec(tuple(parsed))

    task = data.get("task") or {}
    n_max, quotient, output_dir = 4, "full", None
    if not isinstance(task, dict):
        P.err(SCHEMA, "task must be a mapping", ("task",))
    else:
        unknown = set(task) - {"n_max", "quotient", "output_dir"}
        if unknown:
            P.err(SCHEMA, f"unknown task keys {sorted(unknown)}", ("task",))
        n_max = task.get("n_max", 4)
        if P.expect(n_max, int, ("task", "n_max"), "n_max") and n_max < 0:
            P.err(SCHEMA, "n_max must be non-negative", ("task", "n_max"))
        quotient = task.get("quotient", "full")
        if quotient not in ("full", "base"):
            P.err(SCHEMA, "quotient must be 'full' or 'base'", ("task", "quotient"))
        output_dir = task.get("output_dir")
        if output_dir is not None:
            output_dir = str(output_dir)

    if P.diags:
        raise JobSpecError(P.diags)
    base = Graph.from_edges(vertices, pairs)
    vg = VoltageGraph.from_representatives(base, spec, volts, inertia)
    return JobSpec(vg, tuple(names), n_max, quotient, output_dir, version, source)


def load_jobspec(path) -> JobSpec:
    path = Path(path)
    return parse_jobspec(path.read_text(), source=str(path))


def shipped_job(name: str) -> Path:
    """Path of a job file bundled with the package, e.g. ``"section5_case_b"``."""
    if not name.endswith(".job"):
        name += ".job"
    return Path(str(resources.files("graphtower") / "jobs" / name))
