"""Text formats read and written by the command line tool.

Relation files
    Delimited text (comma, tab or whitespace).  The first line names the
    attributes; an optional trailing ``__count`` column holds multiplicities.
Domain files
    ``attr: v1,v2,...`` per line, declaring the value order.
Dependency files
    ``X1,X2 -> A`` (FD), ``X ->> Y`` (MD), ``X |-> Y`` (PD).
Evidence files
    ``attr=value`` lines (hard evidence) or
    ``marginal X,Y { x,y : p ; ... }`` blocks (Jeffrey constraints).
Hypergraph files
    One hyperedge per line, comma separated.

Integer-looking tokens are read as ``int`` everywhere so that values from
different files compare equal.  ``#`` starts a comment.
"""
from __future__ import annotations

import csv
import json
import re
from fractions import Fraction
from io import StringIO
from pathlib import Path
from typing import Mapping

from .dependencies import Dependency
from .exceptions import SchemaError
from .network import MarginalConstraint
from .relation import Relation

COUNT_COLUMN = "__count"
_INT = re.compile(r"^[+-]?\d+$")


def coerce(token: str):
    token = token.strip()
    return int(token) if _INT.match(token) else token


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def parse_domains(text: str) -> dict[str, tuple]:
    out = {}
    for n, line in _lines(text):
        if ":" not in line:
            raise SchemaError(f"domain line {n}: expected 'attr: v1,v2,...', got {line!r}")
        name, values = line.split(":", 1)
        name = name.strip()
        vals = tuple(coerce(v) for v in values.split(",") if v.strip())
        if not name or not vals:
            raise SchemaError(f"domain line {n}: attribute {name!r} needs at least one value")
        if len(set(vals)) != len(vals):
            raise SchemaError(f"domain line {n}: attribute {name!r} repeats a value")
        out[name] = vals
    return out


def read_domains(path) -> dict[str, tuple]:
    return parse_domains(_read(path))


def _split_rows(text: str) -> list[list[str]]:
    lines = [line for _, line in _lines(text)]
    if not lines:
        raise SchemaError("relation file is empty")
    header = lines[0]
    if "," in header or "\t" in header:
        delim = "," if "," in header else "\t"
        return [[c.strip() for c in row] for row in csv.reader(StringIO("\n".join(lines)), delimiter=delim)]
    return [line.split() for line in lines]


def parse_relation(text: str, domains: Mapping[str, tuple] | None = None) -> Relation:
    rows = _split_rows(text)
    header = rows[0]
    counts = None
    if header and header[-1] == COUNT_COLUMN:
        header = header[:-1]
        counts = []
    if len(set(header)) != len(header):
        raise SchemaError(f"relation header repeats an attribute: {header}")
    data = []
    for n, row in enumerate(rows[1:], 2):
        width = len(header) + (counts is not None)
        if len(row) != width:
            raise SchemaError(f"relation line {n}: expected {width} fields, got {len(row)}")
        values = tuple(coerce(v) for v in row[: len(header)])
        if counts is not None:
            c = coerce(row[-1])
            if not isinstance(c, int) or c < 0:
                raise SchemaError(f"relation line {n}: count {row[-1]!r} is not a nonnegative integer")
            counts.append(c)
        data.append(values)
    domains = dict(domains or {})
    for j, name in enumerate(header):
        if name in domains:
            dom = domains[name]
            for n, values in enumerate(data, 2):
                if values[j] not in dom:
                    raise SchemaError(f"relation line {n}: value {values[j]!r} of {name!r} is not in its declared domain")
    return Relation.from_rows(header, data, domains, counts)


def read_relation(path, domains: Mapping[str, tuple] | None = None) -> Relation:
    return parse_relation(_read(path), domains)


def relation_text(r: Relation, delimiter: str = ",") -> str:
    counted = any(c != 1 for _, c in r.items())
    header = list(r.names) + ([COUNT_COLUMN] if counted else [])
    lines = [delimiter.join(header)]
    for t, c in r.items():
        lines.append(delimiter.join([str(v) for v in t] + ([str(c)] if counted else [])))
    return "\n".join(lines) + "\n"


_DEP = re.compile(r"^(.*?)\s*(\|->|->>|->)\s*(.*)$")
_KINDS = {"->": "FD", "->>": "MD", "|->": "PD"}


def _attr_list(text: str) -> tuple[str, ...]:
    return tuple(a.strip() for a in re.split(r"[,\s]+", text.strip()) if a.strip())


def parse_dependencies(text: str) -> list[Dependency]:
    out = []
    for n, line in _lines(text):
        m = _DEP.match(line)
        if not m:
            raise SchemaError(f"dependency line {n}: cannot parse {line!r}")
        lhs, arrow, rhs = m.groups()
        rhs_attrs = _attr_list(rhs)
        if not rhs_attrs:
            raise SchemaError(f"dependency line {n}: empty right-hand side")
        out.append(Dependency(_KINDS[arrow], _attr_list(lhs), rhs_attrs))
    return out


def read_dependencies(path) -> list[Dependency]:
    return parse_dependencies(_read(path))


def dependencies_text(deps) -> str:
    return "".join(f"{d}\n" for d in deps)


_BLOCK = re.compile(r"marginal\s+([^{]+?)\s*\{(.*?)\}", re.DOTALL)


def _number(token: str):
    token = token.strip()
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"bad probability {token!r}") from None


def _check_value(domains, attr, value, where):
    if domains is None:
        return
    if attr not in domains:
        raise SchemaError(f"{where}: unknown attribute {attr!r}")
    if value not in domains[attr]:
        raise SchemaError(f"{where}: value {value!r} is not in the domain of {attr!r}")


def parse_evidence(text: str, domains: Mapping[str, tuple] | None = None) -> list[MarginalConstraint]:
    """Constraints in file order; each hard observation becomes a point mass."""
    found = []
    for m in _BLOCK.finditer(text):
        attrs = _attr_list(m.group(1).replace(",", " "))
        start_line = text.count("\n", 0, m.start()) + 1
        target = {}
        for entry in re.split(r"[;\n]", m.group(2)):
            entry = entry.split("#", 1)[0].strip()
            if not entry:
                continue
            if ":" not in entry:
                raise SchemaError(f"evidence line {start_line}: expected 'values : p', got {entry!r}")
            cfg, p = entry.rsplit(":", 1)
            cfg = tuple(coerce(v) for v in cfg.split(","))
            if len(cfg) != len(attrs):
                raise SchemaError(f"evidence line {start_line}: {cfg} does not match {attrs}")
            for a, v in zip(attrs, cfg):
                _check_value(domains, a, v, f"evidence line {start_line}")
            target[cfg] = target.get(cfg, 0) + _number(p)
        found.append((start_line, MarginalConstraint(attrs, target)))
    rest = _BLOCK.sub(lambda m: "\n" * m.group(0).count("\n"), text)
    for n, raw in enumerate(rest.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            if "=" not in line:
                raise SchemaError(f"evidence line {n}: expected 'attr=value', got {line!r}")
            attr, value = (s.strip() for s in line.split("=", 1))
            value = coerce(value)
            _check_value(domains, attr, value, f"evidence line {n}")
            found.append((n, MarginalConstraint.point({attr: value})))
    found.sort(key=lambda x: x[0])
    return [c for _, c in found]


def read_evidence(path, domains=None) -> list[MarginalConstraint]:
    return parse_evidence(_read(path), domains)


def parse_hypergraph(text: str) -> list[tuple[str, ...]]:
    return [_attr_list(line.replace(",", " ")) for _, line in _lines(text)]


def read_hypergraph(path) -> list[tuple[str, ...]]:
    return parse_hypergraph(_read(path))


# -- serialization ---------------------------------------------------------

def format_probability(p) -> str:
    """Nine fractional digits; exact 0 and 1 print as ``0`` and ``1``."""
    if p == 0:
        return "0"
    if p == 1:
        return "1"
    return f"{float(p):.9f}"


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (float, Fraction)):
        return format_probability(v)
    return json.dumps(str(v), ensure_ascii=False)


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, fixed probability formatting."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        body = ",\n".join(f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent + 1)}" for k, v in items)
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (Mapping, list, tuple)) for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    return _scalar(obj)


def config_key(attrs, cfg) -> str:
    return ",".join(f"{a}={v}" for a, v in zip(attrs, cfg))
