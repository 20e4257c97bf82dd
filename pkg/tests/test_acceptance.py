"""Acceptance suite; a summary line per criterion is printed at the end of the run."""
import random
from fractions import Fraction
from itertools import combinations, product
from math import prod

import numpy as np
import pytest

from relbn import (
    CliquePotential,
    IncompatibleEvidenceError,
    JeffreyConstraint,
    NeighborhoodGraph,
    Relation,
    anneal_decompose,
    build_bn,
    build_junction_tree,
    cond_frequency,
    conditional_table,
    datasets,
    decompose_4nf,
    fd_holds,
    fit_pipeline,
    frequency_model,
    graham_is_acyclic,
    greedy_decompose,
    hard_evidence,
    is_chordal,
    jeffrey_update,
    md_holds,
    moral_graph,
    neighborhood_graph,
    oracle_query,
    pd_holds,
    preserves_fds,
    project,
    propagate,
    total_states,
    verify_lossless_join,
)
from relbn.encoding import decode_index, encode_index
from relbn.learn import KMap, dirichlet_lc, dirichlet_row, learn_table, nnor_learn, score_assignments

from generators import random_fd_instance
from oracles import best_order_cost, condition, joint_of, marginal, naive_lossless, naive_pd, rows_of

criterion = pytest.mark.criterion

MC1, MC2, MC3, MC4, MC5, MC6 = datasets.EXAMPLE1_CLIQUES
RECALL = {"u1": 1, "u3": 1, "u6": -1}


def probabilities(potential):
    return {cfg: p for cfg, p in potential.items() if p != 0}


# -- 1 ----------------------------------------------------------------------

@criterion(1, "4NF decomposition of example 1, lossless join and FD preservation on table1.csv")
def test_criterion1_example1_decomposition(table1, deps1):
    dec = decompose_4nf(table1.names, deps1)
    expected = {
        ("u1", "u2", "u3", "u7"),
        ("u3", "u4", "u5", "u8"),
        ("u6", "u7", "u8", "u9"),
        ("u3", "u7", "u8", "u10"),
        ("u9", "u10", "u11"),
        ("u1", "u2", "u3", "u4", "u5", "u6"),
    }
    assert {frozenset(s) for s in dec.schemes} == {frozenset(s) for s in expected}
    assert len(dec.schemes) == 6
    assert verify_lossless_join(table1, dec)
    assert naive_lossless(rows_of(table1), table1.names, dec.schemes)
    assert preserves_fds(deps1, dec)
    for d in deps1:
        assert fd_holds(table1, d.lhs, d.rhs)


# -- 2 ----------------------------------------------------------------------

def counts(relation, attrs):
    p = project(relation, attrs, "multiset")
    return dict(p.items())


@criterion(2, "multiset projections of table3.csv give the expected counts (A=0,C=0 is 76000)")
def test_criterion2_statistical_projections(table3):
    assert counts(table3, ["A", "B"]) == {(0, 0): 64000, (0, 1): 16000, (1, 0): 4000, (1, 1): 16000}
    # the printed 7600 cannot be right: the A=0 column must add up to 80000
    assert counts(table3, ["A", "C"]) == {(0, 0): 76000, (1, 0): 16000, (0, 1): 4000, (1, 1): 4000}
    bcd = counts(table3, ["B", "C", "D"])
    d0 = [bcd[(b, c, 0)] for b, c in ((0, 0), (0, 1), (1, 0), (1, 1))]
    d1 = [bcd[(b, c, 1)] for b, c in ((0, 0), (0, 1), (1, 0), (1, 1))]
    assert d0 == [60800, 800, 5600, 800]
    assert d1 == [3200, 3200, 22400, 3200]
    assert counts(table3, ["C", "E"]) == {(0, 0): 36800, (1, 0): 1600, (0, 1): 55200, (1, 1): 6400}
    assert sum(counts(table3, ["A", "C"]).values()) == len(table3) == 100000


# -- 3 ----------------------------------------------------------------------

@criterion(3, "PDs on table3.csv: BC|->D and C|->E hold, A|->B and A|->C do not")
def test_criterion3_claimed_pds_a_to_b_and_a_to_c_fail_on_table3_while_bc_to_d_and_c_to_e_hold(table3):
    rows = rows_of(table3)
    names = list(table3.names)
    domains = table3.domains
    for lhs, rhs, expected in ((("B", "C"), ("D",), True), (("C",), ("E",), True),
                               (("A",), ("B",), False), (("A",), ("C",), False)):
        rest = [a for a in names if a not in lhs + rhs]
        assert pd_holds(table3, lhs, rhs) is expected
        assert naive_pd(rows, list(lhs), list(rhs), rest, domains) is expected


# -- 4 ----------------------------------------------------------------------

@criterion(4, "example 1 neighbourhood graph is chordal with cliques MC1..MC6, 124 states, acyclic")
def test_criterion4_example1_cliques(table1, deps1):
    g = moral_graph(build_bn(deps1, table1.names))
    assert is_chordal(g)
    sizes = {a: len(table1.domain(a)) for a in table1.names}
    tri = greedy_decompose(g, sizes)
    assert not tri.fill
    assert {frozenset(c) for c in tri.cliques} == {frozenset(c) for c in datasets.EXAMPLE1_CLIQUES}
    assert tri.cost == total_states(tri.cliques, sizes) == 124
    assert total_states([table1.names], sizes) == prod(sizes.values()) == 4608
    assert graham_is_acyclic(tri.cliques)
    assert graham_is_acyclic(datasets.EXAMPLE1_CLIQUES)


# -- 5 ----------------------------------------------------------------------

PRIORS = {
    MC1: {"5": .125, "6": .25, "0": .5, "3": .125},
    MC2: {k: .125 for k in ("0", "4", "7", "8", "a", "c", "d", "f")},
    MC3: {"5": .125, "3": .125, "e": .25, "0": .125, "7": .125, "a": .125, "c": .125},
    MC4: {"14": .25, "03": .125, "16": .125, "00": .125, "0f": .125, "07": .125, "12": .125},
    MC5: {"22": .125, "0d": .25, "29": .125, "04": .125, "1d": .125, "20": .125, "25": .125},
    MC6: {"1d": .25, "00": .125, "05": .125, "18": .125, "13": .125, "11": .125, "0c": .125},
}


@criterion(5, "frequency priors match the expected hex-indexed clique tables")
def test_criterion5_clique_priors(table1):
    model = frequency_model(table1, build_junction_tree(datasets.EXAMPLE1_CLIQUES, table1.names))
    got = {p.attrs: p.by_index() for p in model.potentials}
    assert got == PRIORS


# -- 6 ----------------------------------------------------------------------

RECALLED = {
    MC1: (1, -1, 1),
    MC2: (1, -1, 1, -1),
    MC3: (-1, 1, -1, 1),
    MC4: (1, 1, -1, -1),
    MC5: (1, -1, 0, -1),
    MC6: (1, 1, 1, 1),
}


@criterion(6, "recall query: propagation pins every clique but u5 in MC5; the oracle pins all six")
def test_criterion6_recall_query(table1):
    tree = build_junction_tree(datasets.EXAMPLE1_CLIQUES, table1.names)
    post = propagate(frequency_model(table1, tree), hard_evidence(RECALL))
    assert post.disagreement() < 1e-9
    got = {p.attrs: probabilities(p) for p in post.potentials}
    for clique, cfg in RECALLED.items():
        if clique == MC5:
            continue
        assert got[clique] == {cfg: pytest.approx(1.0, abs=1e-9)}
    assert got[MC5] == {(1, -1, 0, -1): pytest.approx(0.5, abs=1e-9), (1, -1, -1, -1): pytest.approx(0.5, abs=1e-9)}
    oracle = oracle_query(table1, hard_evidence(RECALL), list(RECALLED))
    for clique, cfg in RECALLED.items():
        table = {k: float(v) for k, v in oracle[clique].items() if v != 0}
        assert table == {cfg: pytest.approx(1.0, abs=1e-9)}


# -- 7 ----------------------------------------------------------------------

@criterion(7, "NN/OR on the u7 and u8 maps: fills, assignment scores {8,5,11,8} and minimal formulas")
def test_criterion7_nnor_maps(table1, deps1):
    bn = build_bn(deps1, table1.names)
    t7 = conditional_table(table1, "u7", bn.parents("u7"))
    k7 = KMap.from_table(t7, binary_slice=True)
    p2, p5 = (-1, 1, -1), (1, -1, 1)
    assert k7.unseen() == [p2, p5]
    done, formula, report = nnor_learn(k7)
    assert done.cells[p2] == 0 and done.cells[p5] == 1
    assert report.provenance[p2] == report.provenance[p5] == "nn-fill"
    scores = score_assignments(k7, [p2, p5])
    assert {bits: f.complexity for bits, f in scores.items()} == {(0, 0): 8, (0, 1): 5, (1, 0): 11, (1, 1): 8}
    assert min(scores, key=lambda b: scores[b].complexity) == (0, 1)
    assert scores[(0, 1)].render() == formula.render() == "u1~u2 + u1u3 + ~u2u3"
    assert learn_table(t7, "nnor", binary_slice=True).formula.render() == "u1~u2 + u1u3 + ~u2u3"

    t8 = conditional_table(table1, "u8", bn.parents("u8"))
    done, formula, report = nnor_learn(KMap.from_table(t8, binary_slice=True))
    assert done.cells[(-1, -1, -1)] == 0 and done.cells[(1, 1, 1)] == 1
    assert report.or_cells == ((-1, 1, -1),)
    assert report.or_scores == {(0,): 5, (1,): 2}
    assert report.or_choice == (1,) and done.cells[(-1, 1, -1)] == 1
    assert formula.render() == "u4 + u3u5" and formula.complexity == 2


# -- 8 ----------------------------------------------------------------------

@criterion(8, "Dirichlet estimates: unseen rows are 1/V, rows sum to 1, convergence to frequencies")
def test_criterion8_dirichlet(table1, deps1, table3, deps3):
    bn = build_bn(deps1, table1.names)
    for child in ("u7", "u8", "u9", "u10", "u11"):
        t = conditional_table(table1, child, bn.parents(child))
        learned = dirichlet_lc(t)
        for cfg, row in learned.rows.items():
            assert sum(row.values()) == 1
            if t.rows[cfg] is None:
                assert row == {v: Fraction(1, len(t.child_domain)) for v in t.child_domain}
    tables = [conditional_table(table1, c, bn.parents(c)) for c in ("u7", "u9")]
    tables.append(conditional_table(table3, "D", ("B", "C")))
    tables.append(conditional_table(table3, "E", ("C",)))
    for t in tables:
        errors = []
        for scale in (1, 10, 1000):
            worst = 0
            for cfg, row in t.defined().items():
                est = dirichlet_row({v: c * scale for v, c in t.counts[cfg].items()}, t.child_domain)
                assert sum(est.values()) == 1
                worst = max(worst, max(abs(est[v] - Fraction(row[v])) for v in t.child_domain))
            errors.append(worst)
        assert errors[0] > errors[1] > errors[2] > 0


# -- 9 ----------------------------------------------------------------------

@criterion(9, "example 2: propagation equals the brute-force joint for all single-attribute queries")
def test_criterion9_oracle_equivalence(table3, deps3):
    model = fit_pipeline(table3, deps3).model
    joint = joint_of(table3)
    names = list(table3.names)
    checked = 0
    for a in names:
        for v in table3.domain(a):
            cond = condition(joint, names, **{a: v})
            if not cond:
                with pytest.raises(IncompatibleEvidenceError):
                    propagate(model, hard_evidence({a: v}))
                continue
            post = propagate(model, hard_evidence({a: v}))
            for b in names:
                want = marginal(cond, names, [b])
                got = post.marginal((b,))
                for w in table3.domain(b):
                    assert float(got[(w,)]) == pytest.approx(float(want.get((w,), 0)), abs=1e-9)
                    checked += 1
    assert checked == 2 * 5 * 5 * 2
    spot = propagate(model, hard_evidence(D=1)).marginal(("A",))
    assert float(spot[(1,)]) == pytest.approx(0.425, abs=1e-9)


# -- 10 ---------------------------------------------------------------------

@criterion(10, "property suites (a)-(g)")
def test_criterion10a_fd_implies_pd_with_deterministic_conditionals():
    rng = random.Random(101)
    for _ in range(200):
        names, fds, r = random_fd_instance(rng, rng.randint(3, 6), rng.randint(1, 30))
        for d in fds:
            assert fd_holds(r, d.lhs, d.rhs)
            assert pd_holds(r, d.lhs, d.rhs)
            for x in project(r, d.lhs).tuples():
                cond = cond_frequency(r, d.rhs, dict(zip(d.lhs, x)))
                assert set(cond.nonzero().values()) == {1}


def product_relation(rng: random.Random):
    """Counts n(x, y, z) = a(x, y) * b(x, z), so Y and Z are independent given X."""
    dx, dy, dz = (rng.randint(1, 3) for _ in range(3))
    a = {(x, y): rng.choice((0, 1, 2, 3)) for x in range(dx) for y in range(dy)}
    b = {(x, z): rng.choice((0, 1, 2, 3)) for x in range(dx) for z in range(dz)}
    rows = [(x, y, z) for x, y, z in product(range(dx), range(dy), range(dz))
            for _ in range(a[x, y] * b[x, z])]
    if not rows:
        rows = [(0, 0, 0)]
    return Relation.from_rows("XYZ", rows, {"X": range(dx), "Y": range(dy), "Z": range(dz)})


@criterion(10, "property suites (a)-(g)")
def test_criterion10b_pd_implies_md_on_product_relations():
    rng = random.Random(102)
    for _ in range(200):
        r = product_relation(rng)
        assert pd_holds(r, "X", "Y")
        assert md_holds(r, "X", "Y")


@criterion(10, "property suites (a)-(g)")
def test_criterion10c_fd_consistent_instances_decompose_losslessly():
    rng = random.Random(103)
    for _ in range(100):
        names, fds, r = random_fd_instance(rng, rng.randint(3, 7), rng.randint(1, 30))
        dec = decompose_4nf(names, fds)
        assert verify_lossless_join(r, dec)
        assert naive_lossless(rows_of(r), names, dec.schemes)


@criterion(10, "property suites (a)-(g)")
def test_criterion10d_jeffrey_is_idempotent_and_normalised():
    rng = np.random.default_rng(104)
    for _ in range(100):
        sizes = rng.integers(2, 4, size=rng.integers(1, 5))
        attrs = tuple(f"x{i}" for i in range(len(sizes)))
        table = rng.random(tuple(sizes)) * (rng.random(tuple(sizes)) > 0.3)
        table.flat[0] += 1e-3
        p = CliquePotential(attrs, [tuple(range(k)) for k in sizes], table / table.sum())
        sub = tuple(rng.permutation(attrs)[: rng.integers(1, len(attrs) + 1)])
        support = [tuple(int(i) for i in ix) for ix in np.argwhere(p.marginal_array(sub) > 0)]
        w = rng.random(len(support))
        q = JeffreyConstraint(sub, dict(zip(support, w / w.sum())))
        once = jeffrey_update(p, q)
        twice = jeffrey_update(once, q)
        assert once.total() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(twice.table, once.table, atol=1e-12)


@criterion(10, "property suites (a)-(g)")
def test_criterion10e_propagation_calibrates_random_trees():
    rng = random.Random(105)
    for _ in range(60):
        names = [f"a{i}" for i in range(rng.randint(2, 7))]
        rows = [tuple(rng.randint(0, 2) for _ in names) for _ in range(rng.randint(1, 20))]
        r = Relation.from_rows(names, rows, {a: (0, 1, 2) for a in names})
        families = [rng.sample(names, rng.randint(1, min(3, len(names)))) for _ in range(rng.randint(1, len(names)))]
        tri = greedy_decompose(neighborhood_graph(families, names), dict.fromkeys(names, 3))
        model = frequency_model(r, build_junction_tree(tri.cliques, names))
        row = rng.choice(sorted(r.tuples()))
        seen = rng.sample(range(len(names)), rng.randint(1, len(names)))
        post = propagate(model, hard_evidence({names[i]: row[i] for i in seen}))
        assert post.disagreement() < 1e-9


@criterion(10, "property suites (a)-(g)")
def test_criterion10f_annealer_against_greedy_and_exhaustive_optimum():
    rng = random.Random(106)
    exhaustive = 0
    for i in range(50):
        n = 2 + i % 11
        nodes = [f"v{k}" for k in range(n)]
        edges = [e for e in combinations(nodes, 2) if rng.random() < rng.uniform(0.2, 0.7)]
        g = NeighborhoodGraph(tuple(nodes), frozenset(frozenset(e) for e in edges))
        sizes = {v: rng.randint(2, 3) for v in nodes}
        greedy = greedy_decompose(g, sizes)
        annealed = anneal_decompose(g, sizes, seed=i)
        assert annealed.cost <= greedy.cost
        if n <= 7:
            assert annealed.cost == best_order_cost(nodes, edges, sizes)
            exhaustive += 1
    assert exhaustive == 30


@criterion(10, "property suites (a)-(g)")
def test_criterion10g_index_round_trip_on_every_clique_state(table1):
    for clique in datasets.EXAMPLE1_CLIQUES:
        domains = [table1.domain(a) for a in clique]
        seen = set()
        for values in product(*domains):
            code = encode_index(values, domains)
            assert decode_index(code, domains) == values
            seen.add(code)
        assert len(seen) == prod(len(d) for d in domains)
