"""Exact two-level (sum-of-products) minimization for small Boolean functions.

Prime implicants come from Quine-McCluskey merging; the cheapest cover is
found by branch and bound over the primes.  Cost is the literal count, which
fixes the formula complexity ``literals - 1`` (negation is free).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from ..exceptions import SchemaError, SizeLimitError

MAX_VARIABLES = 6

Literal = tuple[str, bool]


@dataclass(frozen=True)
class SopFormula:
    names: tuple[str, ...]
    terms: tuple[tuple[Literal, ...], ...]
    constant: bool | None = None

    @property
    def literal_count(self) -> int:
        return sum(len(t) for t in self.terms)

    @property
    def complexity(self) -> int:
        """Number of binary connectives: literal occurrences minus one, 0 for constants."""
        if self.constant is not None or not self.terms:
            return 0
        return self.literal_count - 1

    def evaluate(self, bits: Sequence[int]) -> int:
        if self.constant is not None:
            return int(self.constant)
        value = dict(zip(self.names, bits))
        return int(any(all(bool(value[n]) == pos for n, pos in t) for t in self.terms))

    def truth_table(self) -> dict[tuple[int, ...], int]:
        return {bits: self.evaluate(bits) for bits in product((0, 1), repeat=len(self.names))}

    def term_set(self) -> frozenset:
        return frozenset(frozenset(t) for t in self.terms)

    def render(self, negation: str = "~") -> str:
        if self.constant is not None:
            return "1" if self.constant else "0"
        return " + ".join("".join(("" if pos else negation) + n for n, pos in t) for t in self.terms)

    def __str__(self):
        return self.render()


def parse_sop(text: str, names: Sequence[str]) -> SopFormula:
    """Parse ``u1~u2 + u1u3`` style formulas over known variable ``names``."""
    names = tuple(names)
    text = text.strip()
    if text in ("0", "1"):
        return SopFormula(names, (), text == "1")
    by_len = sorted(names, key=len, reverse=True)
    terms = []
    for raw in text.split("+"):
        raw = raw.replace(" ", "")
        lits = []
        while raw:
            neg = raw.startswith("~")
            if neg:
                raw = raw[1:]
            name = next((n for n in by_len if raw.startswith(n)), None)
            if name is None:
                raise SchemaError(f"cannot parse literal at {raw!r}")
            lits.append((name, not neg))
            raw = raw[len(name):]
        terms.append(tuple(lits))
    return SopFormula(names, tuple(terms))


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _primes(n: int, ones: list[int]) -> list[tuple[int, int]]:
    """Prime implicants as (value, care_mask) pairs; bit i of a minterm is variable i."""
    full = (1 << n) - 1
    level = {(m, full) for m in ones}
    primes = set()
    while level:
        merged = set()
        used = set()
        items = sorted(level)
        by_mask: dict[int, list[int]] = {}
        for v, care in items:
            by_mask.setdefault(care, []).append(v)
        for care, values in by_mask.items():
            vals = set(values)
            for v in values:
                for bit in range(n):
                    b = 1 << bit
                    if care & b and not v & b and (v | b) in vals:
                        merged.add((v, care & ~b))
                        used.add((v, care))
                        used.add((v | b, care))
        primes |= level - used
        level = merged
    return sorted(primes)


def _covers(cube: tuple[int, int], m: int) -> bool:
    v, care = cube
    return (m & care) == v


def _term_key(lits: Sequence[tuple[int, bool]]):
    return (len(lits), [(i, int(pos)) for i, pos in lits])


def _cube_literals(cube, n) -> tuple[tuple[int, bool], ...]:
    v, care = cube
    return tuple((i, bool(v >> (n - 1 - i) & 1)) for i in range(n) if care >> (n - 1 - i) & 1)


def sop_minimize(truth_table: Mapping[tuple[int, ...], int], names: Sequence[str]) -> SopFormula:
    """Minimum-literal sum of products for a total Boolean function.

    ``truth_table`` maps every bit tuple (variable order = ``names``) to 0/1.
    Among equally cheap covers the one with the smallest sorted term list wins.
    """
    names = tuple(names)
    n = len(names)
    if n > MAX_VARIABLES:
        raise SizeLimitError(f"exact minimization is limited to {MAX_VARIABLES} variables, got {n}")
    ones = []
    for bits in product((0, 1), repeat=n):
        if bits not in truth_table:
            raise SchemaError(f"truth table has no entry for {bits}")
        val = truth_table[bits]
        if val not in (0, 1, True, False):
            raise SchemaError(f"truth table value {val!r} is not Boolean")
        if val:
            # first variable is the most significant bit
            ones.append(int("".join(map(str, bits)), 2) if n else 0)
    if not ones:
        return SopFormula(names, (), False)
    if len(ones) == 1 << n:
        return SopFormula(names, (), True)

    primes = _primes(n, ones)
    lits = {p: _cube_literals(p, n) for p in primes}
    cost = {p: len(lits[p]) for p in primes}
    cover_of = {m: [p for p in primes if _covers(p, m)] for m in ones}
    for m in cover_of:
        cover_of[m].sort(key=lambda p: (cost[p], _term_key(lits[p])))

    best: dict = {"cost": None, "key": None, "sel": None}

    def key_of(sel):
        return sorted(_term_key(lits[p]) for p in sel)

    def search(uncovered: frozenset, sel: list, spent: int):
        if best["cost"] is not None and spent > best["cost"]:
            return
        if not uncovered:
            k = key_of(sel)
            if best["cost"] is None or spent < best["cost"] or k < best["key"]:
                best.update(cost=spent, key=k, sel=list(sel))
            return
        # branch on the minterm with the fewest covering primes
        m = min(uncovered, key=lambda x: (len(cover_of[x]), x))
        for p in cover_of[m]:
            if best["cost"] is not None and spent + cost[p] > best["cost"]:
                continue
            sel.append(p)
            search(uncovered - {q for q in uncovered if _covers(p, q)}, sel, spent + cost[p])
            sel.pop()

    search(frozenset(ones), [], 0)
    terms = sorted((lits[p] for p in best["sel"]), key=_term_key)
    return SopFormula(names, tuple(tuple((names[i], pos) for i, pos in t) for t in terms))
