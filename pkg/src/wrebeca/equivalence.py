"""Strong and branching bisimulation checking.

Both relations are decided the same way: refine a partition of the
disjoint union of the two systems until signatures stabilize, then
compare the blocks of the two initial states.  For branching
bisimilarity, strongly connected components of internal steps are
collapsed first (states on a tau cycle are branching bisimilar), after
which internal steps form a DAG and a state's signature can fold in the
signatures of the same-block targets below it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass
class BisimResult:
    equivalent: bool
    relation: str
    rounds: int
    blocks: Optional[list] = None          # block id per union state
    distinguisher: Optional[list] = None   # label sequence, best effort

    def __bool__(self):
        return self.equivalent


def _union(a, b):
    """Merge two systems over a shared label alphabet.

    Returns (n_states, edges, init_a, init_b, labels) where edges is a
    list of (src, label_id, dst) and b's states follow a's.
    """
    labels = list(a.labels)
    label_ids = {text: i for i, text in enumerate(labels)}
    edges = [(s, l, d) for s, l, d in zip(a.src, a.lab, a.dst)]
    remap = []
    for text in b.labels:
        lid = label_ids.get(text)
        if lid is None:
            lid = len(labels)
            labels.append(text)
            label_ids[text] = lid
        remap.append(lid)
    off = a.n_states
    for s, l, d in zip(b.src, b.lab, b.dst):
        edges.append((s + off, remap[l], d + off))
    return a.n_states + b.n_states, edges, a.initial, off + b.initial, labels


def _refine_strong(n, edges):
    """Coarsest strong-bisimulation partition; returns (blocks, rounds)."""
    out = [[] for _ in range(n)]
    for s, l, d in edges:
        out[s].append((l, d))
    blocks = [0] * n
    rounds = 0
    nblocks = 1
    while True:
        rounds += 1
        index = {}
        new = [0] * n
        for s in range(n):
            sig = frozenset((l, blocks[d]) for l, d in out[s])
            key = (blocks[s], sig)
            bid = index.get(key)
            if bid is None:
                bid = len(index)
                index[key] = bid
            new[s] = bid
        if len(index) == nblocks:
            return new, rounds
        nblocks = len(index)
        blocks = new


def _tau_scc(n, edges, tau):
    """Condense tau-cycles; returns (component id per state, count)."""
    succs = [[] for _ in range(n)]
    for s, l, d in edges:
        if l == tau and s != d:
            succs[s].append(d)
    comp = [-1] * n
    low = [0] * n
    num = [0] * n
    on = [False] * n
    stack = []
    counter = [0]
    ncomp = [0]
    for root in range(n):
        if comp[root] != -1 or num[root]:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                counter[0] += 1
                num[v] = low[v] = counter[0]
                stack.append(v)
                on[v] = True
            advanced = False
            children = succs[v]
            while pi < len(children):
                w = children[pi]
                pi += 1
                if not num[w]:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on[w]:
                    low[v] = min(low[v], num[w])
            if advanced:
                continue
            work.pop()
            if low[v] == num[v]:
                cid = ncomp[0]
                ncomp[0] += 1
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp[w] = cid
                    if w == v:
                        break
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return comp, ncomp[0]


def _refine_branching(n, edges, tau):
    """Coarsest branching-bisimulation partition after tau-condensation.

    Returns (blocks over original states, rounds).
    """
    comp, ncomp = _tau_scc(n, edges, tau)
    visible = [[] for _ in range(ncomp)]
    inert_candidates = [[] for _ in range(ncomp)]
    seen_edges = set()
    for s, l, d in edges:
        cs, cd = comp[s], comp[d]
        if l == tau and cs == cd:
            continue  # inert within a condensed component
        key = (cs, l, cd)
        if key in seen_edges:
            continue
        seen_edges.add(key)
        if l == tau:
            inert_candidates[cs].append(cd)
        visible[cs].append((l, cd))

    # topological order of the condensed tau DAG, sinks first
    indeg = [0] * ncomp
    for cs in range(ncomp):
        for cd in inert_candidates[cs]:
            indeg[cd] += 1
    order = [c for c in range(ncomp) if indeg[c] == 0]
    i = 0
    while i < len(order):
        for cd in inert_candidates[order[i]]:
            indeg[cd] -= 1
            if indeg[cd] == 0:
                order.append(cd)
        i += 1
    order.reverse()  # process tau-sinks before their predecessors

    blocks = [0] * ncomp
    rounds = 0
    nblocks = 1
    while True:
        rounds += 1
        sigs = [None] * ncomp
        for c in order:
            sig = set()
            for l, cd in visible[c]:
                if l == tau and blocks[cd] == blocks[c]:
                    sig |= sigs[cd]  # stuttering step: inherit
                else:
                    sig.add((l, blocks[cd]))
            sigs[c] = frozenset(sig)
        index = {}
        new = [0] * ncomp
        for c in range(ncomp):
            key = (blocks[c], sigs[c])
            bid = index.get(key)
            if bid is None:
                bid = len(index)
                index[key] = bid
            new[c] = bid
        if len(index) == nblocks:
            return [new[comp[s]] for s in range(n)], rounds
        nblocks = len(index)
        blocks = new


def _distinguisher(n, edges, blocks, labels, s, t, depth=8):
    """Best-effort distinguishing label sequence for non-bisimilar s, t."""
    out = [[] for _ in range(n)]
    for a, l, d in edges:
        out[a].append((l, d))

    def moves(x):
        m = {}
        for l, d in out[x]:
            m.setdefault(l, set()).add(blocks[d])
        return m

    seq = []
    cur_s, cur_t = s, t
    for _ in range(depth):
        ms, mt = moves(cur_s), moves(cur_t)
        for l in sorted(set(ms) | set(mt), key=lambda x: labels[x]):
            sb = ms.get(l, set())
            tb = mt.get(l, set())
            only = sb ^ tb
            if only:
                seq.append(labels[l])
                target_block = next(iter(only))
                src = cur_s if target_block in sb else cur_t
                for ll, d in out[src]:
                    if ll == l and blocks[d] == target_block:
                        return seq
        # descend along a matching label whose targets still differ
        advanced = False
        for l in sorted(set(ms) & set(mt), key=lambda x: labels[x]):
            for _, d1 in [(l, d) for ll, d in out[cur_s] if ll == l]:
                for _, d2 in [(l, d) for ll, d in out[cur_t] if ll == l]:
                    if blocks[d1] != blocks[d2]:
                        seq.append(labels[l])
                        cur_s, cur_t = d1, d2
                        advanced = True
                        break
                if advanced:
                    break
            if advanced:
                break
        if not advanced:
            return seq or None
    return seq or None


def strong_bisim_equivalent(a, b):
    """Initial states related by some strong bisimulation?

    On success the witness partition is returned (states in the same
    block are strongly bisimilar); on failure a distinguishing label
    sequence is attempted.
    """
    n, edges, ia, ib, labels = _union(a, b)
    blocks, rounds = _refine_strong(n, edges)
    ok = blocks[ia] == blocks[ib]
    result = BisimResult(ok, "strong", rounds, blocks=blocks)
    if not ok:
        lab_ids = {text: i for i, text in enumerate(labels)}
        int_edges = [(s, l, d) for s, l, d in edges]
        result.distinguisher = _distinguisher(
            n, int_edges, blocks, labels, ia, ib)
    return result


def branching_bisim_equivalent(a, b, tau="tau"):
    """Initial states branching bisimilar (tau label identified)?"""
    n, edges, ia, ib, labels = _union(a, b)
    try:
        tau_id = labels.index(tau)
    except ValueError:
        tau_id = -1  # no internal steps anywhere: coincides with strong
    blocks, rounds = _refine_branching(n, edges, tau_id)
    ok = blocks[ia] == blocks[ib]
    return BisimResult(ok, "branching", rounds, blocks=blocks)
