"""Small deterministic graph helpers shared by the automata modules."""

from __future__ import annotations

from typing import Iterable, Sequence


def tarjan_sccs(n: int, succ: Sequence[Sequence[int]]) -> list[list[int]]:
    """Strongly connected components of a graph on vertices 0..n-1.

    Components come out in reverse topological order of the condensation
    (every component is emitted after all components it can reach), and
    members are sorted, so repeated runs number components identically.
    """
    index = [-1] * n
    low = [0] * n
    onstack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work: list[list[int]] = [[root, 0]]
        while work:
            v, i = work[-1]
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                onstack[v] = True
            advanced = False
            while i < len(succ[v]):
                w = succ[v][i]
                i += 1
                if index[w] == -1:
                    work[-1][1] = i
                    work.append([w, 0])
                    advanced = True
                    break
                if onstack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def scc_ids(n: int, sccs: list[list[int]]) -> list[int]:
    ids = [-1] * n
    for k, comp in enumerate(sccs):
        for v in comp:
            ids[v] = k
    return ids


def reachable(succ: Sequence[Sequence[int]], starts: Iterable[int]) -> set[int]:
    seen = set(starts)
    todo = sorted(seen)
    while todo:
        v = todo.pop()
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen
