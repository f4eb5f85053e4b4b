"""Chain construction and verification.

Drives the level loop (product, determinize, minimize, convert) until the
next level comes out empty, converts each level DFW into a
history-deterministic co-Buchi automaton, evaluates natural colors, and
differentially verifies the whole chain against the brute-force LTL oracle
on bounded lassos.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .awa import Awa, dualize, from_ltl
from .floating import (
    Dfw, Nfw, determinize, dfw_accepts_lasso, is_empty_dfw, level_product,
    minimize_dfw, universal_dfw,
)
from .formula import (
    Alphabet, Formula, LassoWord, enumerate_lassos, eval_lasso, to_nnf,
)
from .obligation import ObligationGraph, miyano_hayashi
from .sltm import Sltm, build_canonical_sltm, sltm_from_json, sltm_to_json


class ResourceLimit(Exception):
    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class ChainConfig:
    max_states: int = 10 ** 6
    timeout_s: float = 300.0
    max_levels: int = 64
    check_single_step: bool = True


@dataclass(frozen=True, eq=False)
class HdNcw:
    """Transition-based co-Buchi automaton; SLTM states come first, the
    level's DFW states after.  Accepting transitions are exactly the DFW
    transitions, hence deterministic; everything else is rejecting."""

    alphabet: Alphabet
    n_sltm: int
    n_dfw: int
    initial: int
    acc: dict[tuple[int, frozenset[str]], int]
    rej: dict[tuple[int, frozenset[str]], tuple[int, ...]]

    @property
    def n_states(self) -> int:
        return self.n_sltm + self.n_dfw


@dataclass(frozen=True, eq=False)
class Cocoa:
    """The chain: shared SLTM plus one (DFW, HD-NCW) pair per level."""

    alphabet: Alphabet
    sltm: Sltm
    levels: tuple[tuple[Dfw, HdNcw], ...]
    formula: Formula | None = None
    awa: Awa | None = None

    @property
    def k(self) -> int:
        return len(self.levels)


def dfw_to_hd_ncw(d: Dfw, m: Sltm) -> HdNcw:
    """All DFW transitions become accepting; the SLTM is glued in as the
    rejecting skeleton that lets runs wait before committing."""
    off = m.n_states
    acc = {(off + q, x): off + dst for (q, x), dst in d.trans.items()}
    rej: dict[tuple[int, frozenset[str]], list[int]] = {}

    def add(src: int, x: frozenset[str], dst: int) -> None:
        rej.setdefault((src, x), []).append(dst)

    by_label: dict[int, list[int]] = {}
    for q in range(d.n_states):
        by_label.setdefault(d.label[q], []).append(q)
    for s in range(m.n_states):
        for x in m.alphabet.letters:
            s2 = m.delta[(s, x)]
            add(s, x, s2)
            for q2 in by_label.get(s2, ()):
                add(s, x, off + q2)
    for q in range(d.n_states):
        for x in m.alphabet.letters:
            s2 = m.delta[(d.label[q], x)]
            for q2 in by_label.get(s2, ()):
                add(off + q, x, off + q2)
    return HdNcw(
        alphabet=m.alphabet,
        n_sltm=m.n_states,
        n_dfw=d.n_states,
        initial=m.initial,
        acc=acc,
        rej={k: tuple(sorted(set(v))) for k, v in rej.items()},
    )


def ncw_accepts_lasso(c: HdNcw, w: LassoWord) -> bool:
    """Co-Buchi lasso membership: a reachable product node from which the
    deterministic accepting sub-relation runs forever."""
    n = w.n_positions
    seen = {(c.initial, 0)}
    todo = [(c.initial, 0)]
    while todo:
        q, i = todo.pop()
        x = w.letter_at(i)
        j = w.next_pos(i)
        dsts = list(c.rej.get((q, x), ()))
        a = c.acc.get((q, x))
        if a is not None:
            dsts.append(a)
        for dst in dsts:
            if (dst, j) not in seen:
                seen.add((dst, j))
                todo.append((dst, j))

    memo: dict[tuple[int, int], bool] = {}

    def survives(q: int, i: int) -> bool:
        path = []
        on_path = set()
        cur = (q, i)
        while True:
            known = memo.get(cur)
            if known is not None:
                val = known
                break
            if cur in on_path:
                val = True
                break
            path.append(cur)
            on_path.add(cur)
            cq, ci = cur
            nq = c.acc.get((cq, w.letter_at(ci)))
            if nq is None:
                val = False
                break
            cur = (nq, w.next_pos(ci))
        for node in path:
            memo[node] = val
        return val

    return any(survives(q, i) for (q, i) in seen)


def build_chain(a: Awa, config: ChainConfig | None = None,
                formula: Formula | None = None) -> Cocoa:
    """Run the whole pipeline: obligation graphs, canonical SLTM, universal
    automaton, then per-level product/determinize/minimize/convert until a
    level comes out empty."""
    cfg = config or ChainConfig()
    t0 = time.monotonic()

    def checkpoint(n_states: int, what: str, partial=None) -> None:
        if n_states > cfg.max_states:
            raise ResourceLimit(f"{what} exceeded {cfg.max_states} states", partial)
        if time.monotonic() - t0 > cfg.timeout_s:
            raise ResourceLimit(f"timed out after {cfg.timeout_s}s during {what}", partial)

    g_neg = miyano_hayashi(dualize(a))
    checkpoint(g_neg.n_vertices, "complement obligation graph")
    g_pos = miyano_hayashi(a)
    checkpoint(g_pos.n_vertices, "obligation graph")
    m = build_canonical_sltm(a, g_neg=g_neg, g_pos=g_pos,
                             check_single_step=cfg.check_single_step)
    checkpoint(m.n_states, "suffix-language tracking machine")

    levels: list[tuple[Dfw, HdNcw]] = []
    prev = universal_dfw(m)
    ell = 1
    while True:
        if ell > cfg.max_levels:
            raise ResourceLimit(f"more than {cfg.max_levels} levels", levels)
        nfw = level_product(prev, m, ell, g_neg, g_pos)
        checkpoint(nfw.n_states, f"level {ell} product", levels)
        d = determinize(nfw, m)
        checkpoint(d.n_states, f"level {ell} determinization", levels)
        d = minimize_dfw(d, m)
        if is_empty_dfw(d):
            break
        levels.append((d, dfw_to_hd_ncw(d, m)))
        prev = d
        ell += 1
    return Cocoa(alphabet=a.alphabet, sltm=m, levels=tuple(levels),
                 formula=formula, awa=a)


def build_chain_for_formula(f: Formula, alphabet: Alphabet | None = None,
                            config: ChainConfig | None = None) -> Cocoa:
    from .formula import atom_names

    nnf = to_nnf(f)
    if alphabet is None:
        names = atom_names(nnf) or atom_names(f)
        if not names:
            names = ["a"]
        alphabet = Alphabet.from_aps(names)
    a = from_ltl(nnf, alphabet)
    return build_chain(a, config=config, formula=f)


def natural_color(chain: Cocoa, w: LassoWord) -> int:
    """Maximal level accepting the word, 0 if none (evaluated on the DFWs)."""
    color = 0
    for i, (dfw, _ncw) in enumerate(chain.levels, start=1):
        if dfw_accepts_lasso(dfw, chain.sltm, w):
            color = i
    return color


@dataclass
class VerifyReport:
    formula: str
    prefix_bound: int
    period_bound: int
    lassos: int = 0
    counterexamples: int = 0
    first_counterexample: dict | None = None
    monotonicity_ok: bool = True
    elapsed_s: float = 0.0

    @property
    def ok(self) -> bool:
        return self.counterexamples == 0 and self.monotonicity_ok

    def to_json(self) -> dict:
        return {
            "formula": self.formula,
            "prefix_bound": self.prefix_bound,
            "period_bound": self.period_bound,
            "lassos": self.lassos,
            "counterexamples": self.counterexamples,
            "first_counterexample": self.first_counterexample,
            "monotonicity_ok": self.monotonicity_ok,
            "elapsed_s": round(self.elapsed_s, 3),
            "ok": self.ok,
        }


def verify_chain(chain: Cocoa, f: Formula, prefix_bound: int,
                 period_bound: int) -> VerifyReport:
    """Check max-even soundness against the lasso oracle: a word belongs to
    the language exactly when its natural color is even.  Also checks that
    level acceptance is downward closed (chain monotonicity)."""
    t0 = time.monotonic()
    nnf = to_nnf(f)
    report = VerifyReport(str(f), prefix_bound, period_bound)
    for w in enumerate_lassos(chain.alphabet, prefix_bound, period_bound):
        report.lassos += 1
        accept_vector = [dfw_accepts_lasso(d, chain.sltm, w) for d, _ in chain.levels]
        color = 0
        for i, acc in enumerate(accept_vector, start=1):
            if acc:
                color = i
        for i in range(1, len(accept_vector)):
            if accept_vector[i] and not accept_vector[i - 1]:
                report.monotonicity_ok = False
        member = eval_lasso(nnf, w)
        if (color % 2 == 0) != member:
            report.counterexamples += 1
            if report.first_counterexample is None:
                report.first_counterexample = {
                    "lasso": w.text(),
                    "natural_color": color,
                    "oracle_member": member,
                }
    report.elapsed_s = time.monotonic() - t0
    return report


def drop_accepting_transition(chain: Cocoa) -> Cocoa:
    """Fault injection for the verifier: remove one accepting transition
    (the first transition of the last level's DFW)."""
    if not chain.levels:
        raise ValueError("cannot mutate an empty chain")
    d, _ = chain.levels[-1]
    items = sorted(d.trans.items(), key=lambda kv: (kv[0][0], tuple(sorted(kv[0][1]))))
    if not items:
        raise ValueError("last level has no transitions")
    dropped = dict(items[1:])
    mutated = Dfw(alphabet=d.alphabet, n_states=d.n_states, label=d.label,
                  trans=dropped, origin=d.origin)
    levels = chain.levels[:-1] + ((mutated, dfw_to_hd_ncw(mutated, chain.sltm)),)
    return Cocoa(alphabet=chain.alphabet, sltm=chain.sltm, levels=levels,
                 formula=chain.formula, awa=chain.awa)


# --- serialization -----------------------------------------------------------


def chain_to_json(chain: Cocoa) -> dict:
    letters = chain.alphabet.letters

    def dfw_json(d: Dfw) -> dict:
        return {
            "states": d.n_states,
            "f": list(d.label),
            "origin": [[p, sorted(vs)] for (p, vs) in d.origin],
            "delta": sorted(
                [q, letters.index(x), dst] for (q, x), dst in d.trans.items()),
        }

    return {
        "format": "cocoa-chain",
        "version": 1,
        "formula": None if chain.formula is None else str(chain.formula),
        "aps": list(chain.alphabet.aps),
        "letters": [sorted(l) for l in letters],
        "k": chain.k,
        "sltm": sltm_to_json(chain.sltm),
        "levels": [dfw_json(d) for d, _ in chain.levels],
    }


def chain_from_json(data: dict) -> Cocoa:
    if data.get("format") != "cocoa-chain":
        raise ValueError("not a chain dump")
    alphabet = Alphabet(tuple(data["aps"]), tuple(frozenset(l) for l in data["letters"]))
    m = sltm_from_json(data["sltm"])
    levels = []
    for lvl in data["levels"]:
        trans = {}
        for q, li, dst in lvl["delta"]:
            trans[(q, alphabet.letters[li])] = dst
        d = Dfw(
            alphabet=alphabet,
            n_states=lvl["states"],
            label=tuple(lvl["f"]),
            trans=trans,
            origin=tuple((p, frozenset(vs)) for p, vs in lvl["origin"]),
        )
        levels.append((d, dfw_to_hd_ncw(d, m)))
    formula = None
    if data.get("formula"):
        from .formula import parse_ltl

        formula = parse_ltl(data["formula"], data["aps"])
    return Cocoa(alphabet=alphabet, sltm=m, levels=tuple(levels),
                 formula=formula, awa=None)


def _letter_expr(letter: frozenset[str], aps: tuple[str, ...]) -> str:
    if not aps:
        return "t"
    terms = []
    for i, ap in enumerate(aps):
        terms.append(str(i) if ap in letter else f"!{i}")
    return "&".join(terms)


def level_to_hoa(chain: Cocoa, level: int) -> str:
    """HOA v1 text for one level's HD-NCW; rejecting transitions carry
    acceptance set {0} under `Acceptance: 1 Fin(0)`."""
    d, c = chain.levels[level - 1]
    aps = chain.alphabet.aps
    lines = [
        "HOA: v1",
        f'name: "level {level}"',
        f"States: {c.n_states}",
        f"Start: {c.initial}",
        f"AP: {len(aps)} " + " ".join(f'"{ap}"' for ap in aps),
        "acc-name: co-Buchi",
        "Acceptance: 1 Fin(0)",
        "properties: trans-labels explicit-labels trans-acc",
        "--BODY--",
    ]
    for src in range(c.n_states):
        lines.append(f"State: {src}")
        for x in chain.alphabet.letters:
            expr = _letter_expr(x, aps)
            dst = c.acc.get((src, x))
            if dst is not None:
                lines.append(f"[{expr}] {dst}")
            for rdst in c.rej.get((src, x), ()):
                lines.append(f"[{expr}] {rdst} {{0}}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"
