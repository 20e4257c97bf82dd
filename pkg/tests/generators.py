"""Random instances shared by the property and acceptance suites."""
import random

from relbn import Dependency, Relation

FD = Dependency.fd


def random_fd_instance(rng: random.Random, n_attrs: int, n_rows: int):
    """Random acyclic FDs and a relation satisfying them.

    Each determined attribute is a random function of earlier attributes.
    """
    names = [f"a{i}" for i in range(n_attrs)]
    fds = []
    funcs = {}
    for i in range(1, n_attrs):
        if rng.random() < 0.6 or (i == n_attrs - 1 and not fds):
            lhs = tuple(sorted(rng.sample(names[:i], rng.randint(1, min(2, i))), key=names.index))
            fds.append(FD(lhs, names[i]))
            funcs[names[i]] = (lhs, {})
    rows = []
    for _ in range(n_rows):
        row = {}
        for a in names:
            if a in funcs:
                lhs, table = funcs[a]
                key = tuple(row[x] for x in lhs)
                row[a] = table.setdefault(key, rng.randint(0, 2))
            else:
                row[a] = rng.randint(0, 2)
        rows.append(tuple(row[a] for a in names))
    return names, fds, Relation.from_rows(names, rows, {a: (0, 1, 2) for a in names})
