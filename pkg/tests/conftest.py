"""Shared fixtures: the worked-example automaton, random formula corpus,
and the test-only NFW membership oracle."""

from __future__ import annotations

import itertools
import random

import pytest

from cocoa import (
    Alphabet, LassoWord, always, atom, conj, disj, enumerate_lassos,
    eventually, neg, nxt, release, until,
)
from cocoa.awa import Awa, Pcnf, _edge_lists, _scc_ranks
from cocoa.floating import Nfw
from cocoa.sltm import Sltm


def random_nnf(rng: random.Random, size: int, aps):
    """Random formula in negation normal form with at most `size` nodes."""
    if size <= 1:
        name = rng.choice(aps)
        return atom(name) if rng.random() < 0.5 else neg(atom(name))
    kind = rng.choice(["X", "F", "G", "U", "R", "&", "|"])
    if kind in "XFG":
        child = random_nnf(rng, size - 1, aps)
        return {"X": nxt, "F": eventually, "G": always}[kind](child)
    left_size = rng.randint(1, size - 2) if size > 2 else 1
    left = random_nnf(rng, left_size, aps)
    right = random_nnf(rng, size - 1 - left_size, aps)
    return {"U": until, "R": release, "&": conj, "|": disj}[kind](left, right)


def formula_corpus(count: int, seed: int = 20240601, max_size: int = 6):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        aps = ["a", "b"][: rng.choice([1, 2])]
        out.append((random_nnf(rng, rng.randint(2, max_size), aps), aps))
    return out


def build_fig1() -> Awa:
    """The two-branch weak alternating automaton for FG a or GF b: a
    nondeterministic chain checking FG a on the left, a universal spawner
    checking GF b on the right."""
    alphabet = Alphabet.from_aps(["a", "b"])
    I0, F0, F1, F2, G0, G1, G2, TOP, BOT = range(9)

    def c(*clauses):
        return Pcnf.make([frozenset(cl) for cl in clauses])

    delta = {}
    for x in alphabet.letters:
        has_a = "a" in x
        has_b = "b" in x
        delta[(I0, x)] = c({F0, G0})
        delta[(F0, x)] = c({F0, F1})
        delta[(F1, x)] = c({F1, F2}) if has_a else c({F2})
        delta[(F2, x)] = c({F2})
        delta[(G0, x)] = c({G0}, {G1})
        delta[(G1, x)] = c({G2}) if has_b else c({G1})
        delta[(G2, x)] = c({G2})
        delta[(TOP, x)] = c({TOP})
        delta[(BOT, x)] = c({BOT})
    accepting = frozenset({F1, G0, G2, TOP})
    succ = _edge_lists(9, alphabet, delta)
    rank = tuple(_scc_ranks(9, succ, accepting))
    names = ("i0", "f0", "f1", "f2", "g0", "g1", "g2", "TOP", "BOT")
    return Awa(alphabet, 9, I0, delta, accepting, rank, TOP, BOT, names)


@pytest.fixture(scope="session")
def fig1() -> Awa:
    return build_fig1()


@pytest.fixture(scope="session")
def ab_alphabet() -> Alphabet:
    return Alphabet.from_aps(["a", "b"])


@pytest.fixture(scope="session")
def a_alphabet() -> Alphabet:
    return Alphabet.from_aps(["a"])


def lassos_up_to(alphabet: Alphabet, prefix_bound=2, period_bound=3):
    return enumerate_lassos(alphabet, prefix_bound, period_bound)


def prefixes_up_to(alphabet: Alphabet, max_len: int):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet.letters, repeat=n)


def prepend(w: LassoWord, prefix) -> LassoWord:
    return LassoWord(w.alphabet, tuple(prefix) + w.prefix, w.period)


def nfw_accepts_lasso(n: Nfw, m: Sltm, w: LassoWord) -> bool:
    """Direct NFW lasso membership, used only as a determinization oracle.

    A node (state, lasso position) survives when some successor survives;
    the word is accepted when a jump-in hits a surviving node."""
    nodes = {(q, j) for q in range(n.n_states) for j in range(w.n_positions)}
    changed = True
    while changed:
        changed = False
        for (q, j) in sorted(nodes):
            nxt_j = w.next_pos(j)
            if not any((q2, nxt_j) in nodes for q2 in n.succ(q, w.letter_at(j))):
                nodes.discard((q, j))
                changed = True
    horizon = w.cut + (m.n_states + 1) * len(w.period)
    s = m.initial
    for i in range(horizon):
        j = i if i < w.n_positions else w.cut + (i - w.cut) % len(w.period)
        for q in range(n.n_states):
            if n.label[q] == s and (q, j) in nodes:
                return True
        s = m.delta[(s, w.letter_at(j))]
    return False
