"""Command line front end.

Exit status: 0 on success, 1 on a domain error (bad data, incompatible
evidence, ...), 2 on a usage error.  Every result is written as
deterministic JSON (sorted keys, probabilities with nine decimals).
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import datasets, io
from .decompose import build_junction_tree, graham_is_acyclic, total_states
from .dependencies import decompose_4nf, preserves_fds, verify_lossless_join
from .exceptions import RelbnError
from .inference import frequency_model, oracle_query, propagate
from .learn import KMap, METHODS, learn_table, score_assignments
from .network import build_bn, conditional_table, extract_ccs, moral_graph
from .pipeline import OBJECTIVES, OPTIMIZERS, decompose_network, fit_pipeline
from .relation import Relation, fd_holds, md_holds, pd_holds, project

ENGINE_CLIQUES = "clique-propagation"
ENGINE_ORACLE = "universal-oracle"


@dataclass
class RunConfig:
    subcommand: str
    relation: Path | None = None
    domains: Path | None = None
    deps: Path | None = None
    evidence: Path | None = None
    method: str = "frequency"
    objective: str = "states"
    optimizer: str = "greedy"
    seed: int = 0
    tolerance: float = 1e-9
    binary_slice: bool = False
    out: Path | None = None
    extra: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


# -- helpers ---------------------------------------------------------------

def _domains(cfg: RunConfig):
    return io.read_domains(cfg.domains) if cfg.domains else None


def _relation(cfg: RunConfig) -> Relation:
    if cfg.relation is None:
        raise UsageError(f"{cfg.subcommand} needs --relation")
    return io.read_relation(cfg.relation, _domains(cfg))


def _deps(cfg: RunConfig):
    if cfg.deps is None:
        raise UsageError(f"{cfg.subcommand} needs --deps")
    return io.read_dependencies(cfg.deps)


def _scheme(cfg: RunConfig, deps) -> tuple[str, ...]:
    if cfg.relation is not None:
        return tuple(_relation(cfg).names)
    if cfg.domains is not None:
        return tuple(_domains(cfg))
    seen = []
    for d in deps:
        for a in d.lhs + d.rhs:
            if a not in seen:
                seen.append(a)
    return tuple(seen)


def _attrs(text: str | None):
    if not text:
        return ()
    return tuple(a.strip() for a in text.replace(" ", ",").split(",") if a.strip())


def _ckey(attrs) -> str:
    return ",".join(attrs)


def _potential_json(p, nonzero=True):
    return {io.config_key(p.attrs, c): v for c, v in p.items(nonzero=nonzero)}


def _table_json(t):
    rows = {}
    for cfg in t.parent_configs():
        row = t.rows.get(cfg)
        key = io.config_key(t.parents, cfg) if t.parents else "()"
        rows[key] = "UNDEFINED" if row is None else {str(x): p for x, p in row.items()}
    return {"child": t.child, "parents": list(t.parents), "rows": rows}


def _frequencies_json(tables):
    out = {}
    for t, table in tables.items():
        out[_ckey(t)] = {io.config_key(table.attrs, c): p for c, p in table.entries.items() if p}
    return out


# -- subcommands -----------------------------------------------------------

def cmd_decompose_4nf(cfg: RunConfig):
    deps = _deps(cfg)
    scheme = _scheme(cfg, deps)
    dec = decompose_4nf(scheme, deps)
    out = {
        "schemes": {f"R{i}": list(s) for i, s in enumerate(dec.schemes, 1)},
        "key_scheme": list(dec.key_scheme) if dec.key_scheme else None,
        "notes": list(dec.notes),
    }
    fds = [d for d in deps if d.kind == "FD"]
    if len(fds) == len(deps):
        out["preserves_dependencies"] = preserves_fds(fds, dec)
    if cfg.relation is not None:
        out["lossless_join"] = verify_lossless_join(_relation(cfg), dec)
    return out


def cmd_check(cfg: RunConfig):
    what = cfg.extra["what"]
    if what == "acyclic":
        path = cfg.extra.get("hypergraph")
        if not path:
            raise UsageError("check acyclic needs --hypergraph")
        return "acyclic" if graham_is_acyclic(io.read_hypergraph(path)) else "cyclic"
    if what in ("fd", "md", "pd"):
        lhs, rhs = _attrs(cfg.extra.get("lhs")), _attrs(cfg.extra.get("rhs"))
        if not rhs:
            raise UsageError(f"check {what} needs --rhs (and usually --lhs)")
        test = {"fd": fd_holds, "md": md_holds, "pd": pd_holds}[what]
        return "holds" if test(_relation(cfg), lhs, rhs) else "fails"
    deps = _deps(cfg) if cfg.deps is not None or what == "preserves" else None
    if cfg.extra.get("schemes"):
        schemes = io.read_hypergraph(cfg.extra["schemes"])
    elif deps is not None:
        schemes = decompose_4nf(_scheme(cfg, deps), deps).schemes
    else:
        raise UsageError(f"check {what} needs --schemes or --deps")
    if what == "lossless-join":
        return "lossless" if verify_lossless_join(_relation(cfg), schemes) else "lossy"
    return "preserved" if preserves_fds(deps, schemes) else "not preserved"


def cmd_build_bn(cfg: RunConfig):
    deps = _deps(cfg)
    bn = build_bn(deps, _scheme(cfg, deps))
    g = moral_graph(bn)
    return {
        "nodes": list(bn.nodes),
        "parents": {n: list(bn.parents(n)) for n in bn.nodes},
        "topological_order": list(bn.topological_order()),
        "moral_edges": [list(e) for e in g.sorted_edges()],
    }


def cmd_decompose_bn(cfg: RunConfig):
    deps = _deps(cfg)
    if cfg.relation is not None:
        r = _relation(cfg)
        nodes, sizes = r.names, {a: len(r.domain(a)) for a in r.names}
    elif cfg.domains is not None:
        doms = _domains(cfg)
        nodes, sizes = tuple(doms), {a: len(v) for a, v in doms.items()}
    else:
        raise UsageError("decompose-bn needs --relation or --domains for domain sizes")
    bn = build_bn(deps, nodes)
    tri = decompose_network(bn, sizes, cfg.objective, cfg.optimizer, cfg.seed)
    tree = build_junction_tree(tri.cliques, nodes)
    return {
        "objective": cfg.objective,
        "optimizer": cfg.optimizer,
        "seed": cfg.seed,
        "elimination_order": list(tri.order),
        "fill": [list(e) for e in tri.sorted_fill(nodes)],
        "cliques": [list(c) for c in tree.cliques],
        "cost": tri.cost,
        "total_states": total_states(tri.cliques, sizes),
        "junction_tree": [[_ckey(tree.cliques[i]), _ckey(tree.cliques[j])] for i, j in tree.edges],
        "acyclic": graham_is_acyclic(tri.cliques),
    }


def cmd_learn(cfg: RunConfig):
    r = _relation(cfg)
    bn = build_bn(_deps(cfg), r.names)
    only = _attrs(cfg.extra.get("target"))
    out = {}
    for node in bn.nodes:
        if only and node not in only:
            continue
        parents = bn.parents(node)
        if not parents and not only:
            continue
        lt = learn_table(conditional_table(r, node, parents), cfg.method, cfg.binary_slice)
        entry = _table_json(lt.table)
        entry["provenance"] = {io.config_key(parents, c): p for c, p in lt.provenance.items()}
        entry["formula"] = lt.formula.render() if lt.formula else None
        entry["complexity"] = lt.formula.complexity if lt.formula else None
        out[node] = entry
    return {"method": cfg.method, "binary_slice": cfg.binary_slice, "tables": out}


def _evidence(cfg: RunConfig):
    if cfg.evidence is None:
        return []
    return io.read_evidence(cfg.evidence, _domains(cfg))


def cmd_infer(cfg: RunConfig):
    r = _relation(cfg)
    pipe = fit_pipeline(r, _deps(cfg), cfg.method, cfg.objective, cfg.optimizer, cfg.seed, cfg.binary_slice)
    post = propagate(pipe.model, _evidence(cfg), cfg.tolerance)
    out = {
        "engine": ENGINE_CLIQUES,
        "method": cfg.method,
        "cliques": {_ckey(p.attrs): _potential_json(p) for p in post.potentials},
    }
    targets = _attrs(cfg.extra.get("target"))
    if targets:
        out["marginals"] = _frequencies_json({(t,): post.marginal((t,)) for t in targets})
    return out


def cmd_oracle_infer(cfg: RunConfig):
    r = _relation(cfg)
    ev = _evidence(cfg)
    out = {"engine": ENGINE_ORACLE}
    if cfg.deps is not None:
        pipe = fit_pipeline(r, _deps(cfg), "frequency", cfg.objective, cfg.optimizer, cfg.seed)
        out["cliques"] = _frequencies_json(oracle_query(r, ev, pipe.tree.cliques))
    targets = _attrs(cfg.extra.get("target"))
    if targets:
        out["marginals"] = _frequencies_json(oracle_query(r, ev, [(t,) for t in targets]))
    if len(out) == 1:
        raise UsageError("oracle-infer needs --deps or --target")
    return out


# -- golden tables ---------------------------------------------------------

def reproduce_tables() -> dict[str, object]:
    """Golden reference tables regenerated from the two bundled data sets."""
    r1 = datasets.example1_relation()
    deps1 = datasets.example1_dependencies()
    r3 = datasets.example2_relation()
    deps3 = datasets.example2_dependencies()
    out = {}

    dec1 = decompose_4nf(r1.names, deps1)
    table2 = {}
    for i, s in enumerate(dec1.schemes, 1):
        p = project(r1, s)
        table2[f"R{i}"] = {"scheme": list(p.names), "rows": [list(t) for t in p.tuples()]}
    out["table2"] = {"relations": table2, "key_scheme": list(dec1.key_scheme) if dec1.key_scheme else None,
                     "lossless_join": verify_lossless_join(r1, dec1),
                     "preserves_dependencies": preserves_fds(deps1, dec1)}

    dec3 = decompose_4nf(r3.names, deps3)
    table4 = {}
    for s in dec3.schemes:
        p = project(r3, s, "multiset")
        table4[_ckey(p.names)] = {io.config_key(p.names, t): c for t, c in p.items()}
    out["table4"] = table4

    parts = [project(r1, s) for s in dec1.schemes]
    out["table5"] = {str(d): _table_json(t) for d, t in zip(deps1, extract_ccs(parts, deps1))}

    bn = build_bn(deps1, r1.names)
    sizes = {a: len(r1.domain(a)) for a in r1.names}
    tri = decompose_network(bn, sizes)
    tree = build_junction_tree(tri.cliques, r1.names)
    prior = frequency_model(r1, tree)
    out["table7"] = {_ckey(p.attrs): p.by_index() for p in prior.potentials}

    ev = datasets.recall_evidence()
    post = propagate(prior, ev)
    out["table8"] = {
        ENGINE_CLIQUES: {_ckey(p.attrs): _potential_json(p) for p in post.potentials},
        ENGINE_ORACLE: _frequencies_json(oracle_query(r1, ev, tree.cliques)),
    }

    t7 = conditional_table(r1, "u7", bn.parents("u7"))
    sliced = KMap.from_table(t7, binary_slice=True)
    cells = sliced.unseen()
    scores = score_assignments(sliced, cells)
    lt = learn_table(t7, "nnor", binary_slice=True)
    out["table9"] = {
        "parents": list(sliced.parents),
        "unseen": [io.config_key(sliced.parents, c) for c in cells],
        "assignments": {
            ",".join(map(str, bits)): {"formula": f.render(), "complexity": f.complexity}
            for bits, f in scores.items()
        },
        "nnor_formula": lt.formula.render() if lt.formula else None,
        "nnor_fill": {io.config_key(sliced.parents, c): lt.provenance[c] for c in cells},
    }
    return out


def cmd_reproduce(cfg: RunConfig):
    tables = reproduce_tables()
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        for name, body in tables.items():
            (cfg.out / f"{name}.json").write_text(io.dumps(body) + "\n", encoding="utf-8")
        return None
    return tables


COMMANDS = {
    "decompose-4nf": cmd_decompose_4nf,
    "check": cmd_check,
    "build-bn": cmd_build_bn,
    "decompose-bn": cmd_decompose_bn,
    "learn": cmd_learn,
    "infer": cmd_infer,
    "oracle-infer": cmd_oracle_infer,
    "reproduce": cmd_reproduce,
}


# -- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relbn", description="Belief networks from relational sample data.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, *, relation=True, deps=True):
        if relation:
            p.add_argument("--relation", type=Path, help="relation file (csv/tsv/whitespace)")
        p.add_argument("--domains", type=Path, help="attribute domains file")
        if deps:
            p.add_argument("--deps", type=Path, help="dependency file")
        p.add_argument("--out", type=Path, help="write the result here instead of stdout")

    def decomposition(p):
        p.add_argument("--objective", choices=OBJECTIVES, default="states")
        p.add_argument("--optimizer", choices=OPTIMIZERS, default="greedy")
        p.add_argument("--seed", type=int, default=0)

    common(sub.add_parser("decompose-4nf", help="lossless 4NF decomposition"))

    p = sub.add_parser("check", help="test a dependency or property")
    p.add_argument("what", choices=("fd", "md", "pd", "acyclic", "lossless-join", "preserves"))
    common(p)
    p.add_argument("--lhs", help="comma separated determinant attributes")
    p.add_argument("--rhs", help="comma separated dependent attributes")
    p.add_argument("--hypergraph", type=Path, help="hyperedge file for 'acyclic'")
    p.add_argument("--schemes", type=Path, help="scheme file for 'lossless-join'/'preserves'")

    common(sub.add_parser("build-bn", help="belief network from dependencies"))

    p = sub.add_parser("decompose-bn", help="triangulate and build the junction tree")
    common(p)
    decomposition(p)

    p = sub.add_parser("learn", help="learn conditional tables")
    common(p)
    p.add_argument("--method", choices=METHODS, default="frequency")
    p.add_argument("--binary-slice", action="store_true")
    p.add_argument("--target", help="only these child attributes")

    for name, text in (("infer", "clique propagation"), ("oracle-infer", "brute force over the relation")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--evidence", type=Path, help="evidence file")
        p.add_argument("--target", help="also report these single-attribute marginals")
        decomposition(p)
        if name == "infer":
            p.add_argument("--method", choices=METHODS, default="frequency")
            p.add_argument("--binary-slice", action="store_true")
            p.add_argument("--tolerance", type=float, default=1e-9)

    p = sub.add_parser("reproduce", help="regenerate the golden reference tables from bundled data")
    p.add_argument("--out", type=Path, help="directory for one JSON file per table")
    return parser


def parse_config(argv) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    args = vars(ns)
    for name in ("relation", "domains", "deps", "evidence", "hypergraph", "schemes"):
        path = args.get(name)
        if path is not None and not Path(path).is_file():
            parser.error(f"--{name}: file not found: {path}")
    tolerance = args.get("tolerance", 1e-9)
    if not tolerance > 0:
        parser.error(f"--tolerance must be positive, got {tolerance}")
    known = {f for f in RunConfig.__dataclass_fields__ if f != "extra"}
    cfg = RunConfig(**{k: v for k, v in args.items() if k in known})
    cfg.extra = {k: v for k, v in args.items() if k not in known}
    return cfg


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        result = COMMANDS[cfg.subcommand](cfg)
    except UsageError as e:
        print(f"relbn {cfg.subcommand}: usage error: {e}", file=stderr)
        return 2
    except (RelbnError, KeyError, ValueError) as e:
        msg = str(e).strip().splitlines()[0] if str(e).strip() else type(e).__name__
        print(f"relbn {cfg.subcommand}: {type(e).__name__}: {msg}", file=stderr)
        return 1
    if result is None:
        return 0
    text = (result if isinstance(result, str) else io.dumps(result)) + "\n"
    if cfg.out is not None and cfg.subcommand != "reproduce":
        cfg.out.write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
