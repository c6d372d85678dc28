"""State-space generation.

Three modes over the same worklist skeleton:

* full        -- states are (local states, topology); a move step goes
                 from (s, g) to (s, g') for every other admissible g'.
* tau-elim    -- states drop the topology; every handler is explored
                 under every admissible topology and the label records
                 which topology (or which link statuses) produced it.
* counter     -- static topology only; nodes with the same local state
                 and interchangeable neighborhoods are counted together.

Construction ordering: every rebec's `initial` message is a constructor,
so exploration first interleaves the initial handlers under the initial
topology, with no mobility steps and no per-topology fan-out, and only
then switches to the mode's normal rules.  A state is still in the
construction phase exactly when some queue head is an initial message,
which makes the phase a function of the state itself.

Successor computation is pure, so frontier waves can be mapped over a
thread pool; results are merged in canonical (frontier, successor)
order, which makes state numbering independent of the worker count.
"""

from __future__ import annotations

import time
from array import array
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import (ExplorationLimitExceeded, ModelRuntimeError,
                     StaticTopologyRequired)
from .semantics import DEFAULT_STEP_BUDGET, ModelRuntime
from .topology import enumerate_valid, equivalence_classes, is_static

DEFAULT_MAX_STATES = 5_000_000
DEFAULT_MAX_TRANSITIONS = 30_000_000

TAU = "tau"


@dataclass
class Limits:
    max_states: int = DEFAULT_MAX_STATES
    max_transitions: int = DEFAULT_MAX_TRANSITIONS
    step_budget: int = DEFAULT_STEP_BUDGET


class Lts:
    """Labeled transition system with compact transition storage."""

    def __init__(self, mode="full"):
        self.mode = mode
        self.labels = []
        self._label_ids = {}
        self.src = array("i")
        self.lab = array("i")
        self.dst = array("i")
        self.n_states = 0
        self.initial = 0
        self.keys = []            # state key per index, for decoding
        self.parent_state = array("i")
        self.parent_label = array("i")
        self.topologies = None    # admissible topologies, when relevant
        self.gamma0_index = None
        self.stats = {}

    @property
    def n_transitions(self):
        return len(self.src)

    def label_id(self, text):
        lid = self._label_ids.get(text)
        if lid is None:
            lid = len(self.labels)
            self.labels.append(text)
            self._label_ids[text] = lid
        return lid

    def add_state(self, key, parent=-1, parent_label=-1):
        idx = self.n_states
        self.n_states += 1
        self.keys.append(key)
        self.parent_state.append(parent)
        self.parent_label.append(parent_label)
        return idx

    def add_transition(self, s, label_id, d):
        self.src.append(s)
        self.lab.append(label_id)
        self.dst.append(d)

    def transitions(self):
        labels = self.labels
        for s, l, d in zip(self.src, self.lab, self.dst):
            yield s, labels[l], d

    def path_to(self, index):
        """Indices and incoming label ids from the initial state to index."""
        steps = []
        cur = index
        while cur != 0:
            steps.append((cur, self.parent_label[cur]))
            cur = self.parent_state[cur]
        steps.append((0, -1))
        steps.reverse()
        return steps

    def summary(self):
        wall = self.stats.get("wall", 0.0)
        return (f"mode={self.mode} states={self.n_states} "
                f"transitions={self.n_transitions} wall={wall:.2f}s")


class Clts(Lts):
    """Lts whose labels carry topology or link-status annotations."""

    def __init__(self, label_mode):
        super().__init__(mode="tau-elim")
        self.label_mode = label_mode


@dataclass
class Trace:
    """Alternation of states and incoming action labels for replay."""

    rt: ModelRuntime
    entries: list          # of (state_key, label or None)
    kind: str              # "full" | "tau-elim" | "counter"
    topologies: list = None

    def labels(self):
        return [lab for _, lab in self.entries[1:]]

    def final_key(self):
        return self.entries[-1][0]

    def __len__(self):
        return len(self.entries)


@dataclass
class Monitor:
    """Self-loop label template over per-rebec state variables."""

    template: str        # may contain {i} when per_rebec
    exprs: list          # parsed expressions over one rebec's variables
    per_rebec: bool = False
    rebec: int = None    # fixed rebec when not per_rebec


class _RowView:
    """Topology stand-in exposing one sender's adjacency row."""

    __slots__ = ("me", "row", "n")

    def __init__(self, me, row, n):
        self.me = me
        self.row = row
        self.n = n

    def connected(self, i, j):
        if i == j:
            return True
        if i != self.me:
            raise ValueError("row view only answers for the sender")
        return bool(self.row >> j & 1)


class _Engine:
    """Uniform fire() over either the compiled or the reference engine."""

    def __init__(self, rt, engine, budget):
        self.rt = rt
        self.budget = budget
        self.kind = engine
        if engine == "compiled":
            self.cm = rt.compiled()
        elif engine != "interp":
            raise ValueError(f"unknown engine {engine!r}")

    def fire(self, state, i, row):
        if self.kind == "compiled":
            return self.cm.fire(state, i, row, self.budget)
        from .semantics import GlobalState, handle_message
        view = _RowView(i, row, self.rt.n)
        g2, _, consulted = handle_message(
            self.rt, GlobalState(state, view), i, budget=self.budget)
        mask = 0
        for k in consulted:
            mask |= 1 << k
        return g2.locals, state[i][1][0], mask

    def label(self, msg):
        if self.kind == "compiled":
            return self.cm.label(msg)
        return self.rt.label(msg)


def admissible_topologies(model, constraint=None, topologies=None):
    """The set of topologies exploration ranges over, in canonical order
    unless an explicit list fixes both membership and numbering."""
    if topologies is not None:
        return list(topologies)
    constraint = constraint if constraint is not None else model.constraint
    ids = {r.name: i for i, r in enumerate(model.rebecs)}
    valid = enumerate_valid(constraint, len(model.rebecs), ids)
    return valid


def pick_gamma0(model, valid):
    """Declared initial topology when admissible, else the canonically
    first admissible one (a constraint override can invalidate the
    declared topology; reachability is unaffected by the substitute)."""
    g0 = model.initial_topology
    for i, g in enumerate(valid):
        if g == g0:
            return i, False
    return 0, True


def _annotation(rt, sender, consulted_mask, row):
    if not consulted_mask:
        return "true"
    names = rt.names
    terms = []
    k = 0
    m = consulted_mask
    while m:
        if m & 1:
            if row >> k & 1:
                terms.append(f"con({names[sender]},{names[k]})")
            else:
                terms.append(f"!con({names[sender]},{names[k]})")
        m >>= 1
        k += 1
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = f"and({t},{out})"
    return out


def _enabled(rt, state):
    """(initializing?, rebecs allowed to fire)."""
    init_id = rt.initial_id
    pending = [i for i, (_, q) in enumerate(state) if q]
    initials = [i for i in pending if state[i][1][0][0] == init_id]
    if initials:
        return True, initials
    return False, pending


class _Run:
    """Shared BFS plumbing: numbering, limits, hooks, worker mapping."""

    def __init__(self, rt, lts, limits, workers, state_invariant,
                 step_invariant, post_state_only=True):
        self.rt = rt
        self.lts = lts
        self.limits = limits or Limits()
        self.workers = max(1, workers)
        self.state_invariant = state_invariant
        self.step_invariant = step_invariant
        self.post_state_only = post_state_only
        self.violation = None

    def check_state(self, key, index, locals_, initializing):
        if self.state_invariant is None or self.violation is not None:
            return
        if initializing and self.post_state_only:
            return
        if not self.state_invariant(self.rt, locals_):
            self.violation = index

    def check_step(self, pre_locals, post_locals, index):
        if self.step_invariant is None or self.violation is not None:
            return
        if not self.step_invariant(self.rt, pre_locals, post_locals):
            self.violation = index

    def guard_states(self):
        if self.lts.n_states > self.limits.max_states:
            raise ExplorationLimitExceeded(
                f"state limit {self.limits.max_states} exceeded",
                dict(self.lts.stats, states=self.lts.n_states,
                     transitions=self.lts.n_transitions))

    def guard_transitions(self):
        if self.lts.n_transitions > self.limits.max_transitions:
            raise ExplorationLimitExceeded(
                f"transition limit {self.limits.max_transitions} exceeded",
                dict(self.lts.stats, states=self.lts.n_states,
                     transitions=self.lts.n_transitions))

    def map_frontier(self, fn, frontier):
        if self.workers == 1 or len(frontier) < 2:
            return [fn(x) for x in frontier]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, frontier))


def explore_full(model, limits=None, workers=1, constraint=None,
                 topologies=None, engine="compiled", state_invariant=None,
                 step_invariant=None, rebec_prefix=False):
    """Breadth-first closure under handling and mobility steps."""
    t0 = time.monotonic()
    rt = model if isinstance(model, ModelRuntime) else ModelRuntime(model)
    valid = admissible_topologies(rt.model, constraint, topologies)
    if not valid:
        raise StaticTopologyRequired("constraint admits no topology")
    g0i, replaced = pick_gamma0(rt.model, valid)
    k = len(valid)
    rows_by_g = [g.rows() for g in valid]
    eng = _Engine(rt, engine, (limits or Limits()).step_budget)

    lts = Lts(mode="full")
    lts.topologies = valid
    lts.gamma0_index = g0i
    tau_id = lts.label_id(TAU)
    run = _Run(rt, lts, limits, workers, state_invariant, step_invariant)

    state0 = rt.initial_state()
    # per distinct local-state vector: index per topology, handler cache
    registry = {state0: [[-1] * k, {}]}
    registry[state0][0][g0i] = lts.add_state((state0, g0i))
    init0, _ = _enabled(rt, state0)
    run.check_state((state0, g0i), 0, state0, init0)

    def successors(item):
        state, gi = item
        entry = registry[state]
        cache = entry[1]
        initializing, enabled = _enabled(rt, state)
        rows = rows_by_g[gi]
        out = []
        for i in enabled:
            key = (i, rows[i])
            hit = cache.get(key)
            if hit is None:
                ns, msg, _ = eng.fire(state, i, rows[i])
                lab = rt.label(msg, rebec=i if rebec_prefix else None)
                hit = (lab, ns)
                cache[key] = hit
            out.append(hit)
        return initializing, out

    frontier = [(state0, g0i)]
    while frontier and run.violation is None:
        results = run.map_frontier(successors, frontier)
        next_frontier = []

        def discover(state, gi, parent, lab_id):
            entry = registry.get(state)
            if entry is None:
                entry = [[-1] * k, {}]
                registry[state] = entry
            idx = entry[0][gi]
            fresh = idx < 0
            if fresh:
                idx = lts.add_state((state, gi), parent, lab_id)
                entry[0][gi] = idx
                run.guard_states()
                next_frontier.append((state, gi))
            return idx, fresh

        for (state, gi), (initializing, succs) in zip(frontier, results):
            src_idx = registry[state][0][gi]
            seen = set()
            for lab, ns in succs:
                lab_id = lts.label_id(lab)
                idx, fresh = discover(ns, gi, src_idx, lab_id)
                if fresh:
                    run.check_state((ns, gi), idx, ns,
                                    _enabled(rt, ns)[0])
                if not initializing:
                    run.check_step(state, ns, idx)
                if (lab_id, idx) not in seen:
                    seen.add((lab_id, idx))
                    lts.add_transition(src_idx, lab_id, idx)
            if not initializing:
                per_gamma = registry[state][0]
                add_src = lts.src.append
                add_lab = lts.lab.append
                add_dst = lts.dst.append
                for gj in range(k):
                    if gj == gi:
                        continue
                    idx = per_gamma[gj]
                    if idx < 0:
                        idx = lts.add_state((state, gj), src_idx, tau_id)
                        per_gamma[gj] = idx
                        run.guard_states()
                        next_frontier.append((state, gj))
                    add_src(src_idx)
                    add_lab(tau_id)
                    add_dst(idx)
            run.guard_transitions()
            if run.violation is not None:
                break
        frontier = next_frontier

    lts.stats = {"mode": "full", "states": lts.n_states,
                 "transitions": lts.n_transitions,
                 "topologies": k, "gamma0_replaced": replaced,
                 "wall": time.monotonic() - t0}
    lts.violation_index = run.violation
    return lts


def explore_tau_eliminated(model, limits=None, workers=1, constraint=None,
                           topologies=None, label_mode="merged",
                           engine="compiled", state_invariant=None,
                           step_invariant=None):
    """Topology-free states; handlers run under every admissible
    topology and labels carry the enabling annotation."""
    if label_mode not in ("enumerated", "merged"):
        raise ValueError(f"unknown label mode {label_mode!r}")
    t0 = time.monotonic()
    rt = model if isinstance(model, ModelRuntime) else ModelRuntime(model)
    valid = admissible_topologies(rt.model, constraint, topologies)
    if not valid:
        raise StaticTopologyRequired("constraint admits no topology")
    g0i, replaced = pick_gamma0(rt.model, valid)
    k = len(valid)
    rows_by_g = [g.rows() for g in valid]
    eng = _Engine(rt, engine, (limits or Limits()).step_budget)

    lts = Clts(label_mode)
    lts.topologies = valid
    lts.gamma0_index = g0i
    run = _Run(rt, lts, limits, workers, state_invariant, step_invariant)

    state0 = rt.initial_state()
    visited = {state0: lts.add_state(state0)}
    run.check_state(state0, 0, state0, _enabled(rt, state0)[0])

    def decorate(gi, i, row, lab, consulted):
        if label_mode == "enumerated":
            return f"gamma{gi + 1}:{lab}"
        return f"{_annotation(rt, i, consulted, row)}:{lab}"

    def successors(state):
        initializing, enabled = _enabled(rt, state)
        out = []
        seen = set()
        if initializing:
            for i in enabled:
                row = rows_by_g[g0i][i]
                ns, msg, consulted = eng.fire(state, i, row)
                lab = decorate(g0i, i, row, eng.label(msg), consulted)
                if (lab, ns) not in seen:
                    seen.add((lab, ns))
                    out.append((lab, ns))
            return initializing, out
        for i in enabled:
            fired = {}
            for gi in range(k):
                row = rows_by_g[gi][i]
                hit = fired.get(row)
                if hit is None:
                    hit = eng.fire(state, i, row)
                    fired[row] = hit
                ns, msg, consulted = hit
                lab = decorate(gi, i, row, eng.label(msg), consulted)
                if (lab, ns) not in seen:
                    seen.add((lab, ns))
                    out.append((lab, ns))
        return initializing, out

    frontier = [state0]
    while frontier and run.violation is None:
        results = run.map_frontier(successors, frontier)
        next_frontier = []
        for state, (initializing, succs) in zip(frontier, results):
            src_idx = visited[state]
            for lab, ns in succs:
                lab_id = lts.label_id(lab)
                idx = visited.get(ns)
                if idx is None:
                    idx = lts.add_state(ns, src_idx, lab_id)
                    visited[ns] = idx
                    run.guard_states()
                    next_frontier.append(ns)
                    run.check_state(ns, idx, ns, _enabled(rt, ns)[0])
                if not initializing:
                    run.check_step(state, ns, idx)
                lts.add_transition(src_idx, lab_id, idx)
            run.guard_transitions()
            if run.violation is not None:
                break
        frontier = next_frontier

    lts.stats = {"mode": f"tau-elim/{label_mode}", "states": lts.n_states,
                 "transitions": lts.n_transitions,
                 "topologies": k, "gamma0_replaced": replaced,
                 "wall": time.monotonic() - t0}
    lts.violation_index = run.violation
    return lts


# -- counter abstraction ---------------------------------------------------

def _transpose(rt, locals_, partition):
    """Group rebec ids by (equivalence block, class, local state)."""
    groups = {}
    for i in range(rt.n):
        key = (partition.block_of(i), rt.rebec_class[i], locals_[i])
        groups.setdefault(key, []).append(i)
    entries = sorted((key, frozenset(ids)) for key, ids in groups.items())
    return tuple(entries)


def _abstract_key(transposed):
    return tuple((key, len(ids)) for key, ids in transposed)


def _concretize(rt, transposed):
    locals_ = [None] * rt.n
    for (block, cls, local), ids in transposed:
        for i in ids:
            locals_[i] = local
    return tuple(locals_)


def explore_counter_abstraction(model, limits=None, workers=1,
                                constraint=None, topologies=None,
                                engine="compiled", force_dynamic=False,
                                state_invariant=None, step_invariant=None):
    """Counted exploration; requires a static topology unless forced.

    With force_dynamic the unsound dynamic variant is built anyway (used
    to demonstrate that the reduction breaks under mobility): states keep
    their topology, mobility steps re-partition the nodes, and handlers
    still fire only for one representative per group.
    """
    t0 = time.monotonic()
    rt = model if isinstance(model, ModelRuntime) else ModelRuntime(model)
    valid = admissible_topologies(rt.model, constraint, topologies)
    if not valid:
        raise StaticTopologyRequired("constraint admits no topology")
    g0i, replaced = pick_gamma0(rt.model, valid)
    if len(valid) > 1 and not force_dynamic:
        raise StaticTopologyRequired(
            f"counter abstraction needs a static topology; the constraint "
            f"admits {len(valid)} topologies. Counting nodes together is "
            f"unsound under mobility (the reduced and original systems "
            f"are not strongly bisimilar).")
    k = len(valid)
    rows_by_g = [g.rows() for g in valid]
    partitions = [equivalence_classes(g) for g in valid]
    eng = _Engine(rt, engine, (limits or Limits()).step_budget)

    lts = Lts(mode="counter")
    lts.topologies = valid
    lts.gamma0_index = g0i
    tau_id = lts.label_id(TAU) if k > 1 else None
    run = _Run(rt, lts, limits, workers, state_invariant, step_invariant)

    locals0 = rt.initial_state()
    trans0 = _transpose(rt, locals0, partitions[g0i])
    key0 = (_abstract_key(trans0), g0i) if force_dynamic \
        else _abstract_key(trans0)
    visited = {key0: 0}
    lts.add_state(key0)
    run.check_state(key0, 0, locals0, _enabled(rt, locals0)[0])

    def successors(item):
        transposed, gi = item
        rows = rows_by_g[gi]
        concrete = _concretize(rt, transposed)
        init_id = rt.initial_id
        initializing = any(local[1] and local[1][0][0] == init_id
                           for (_, _, local), _ in transposed)
        out = []
        for (block, cls, local), ids in transposed:
            if not local[1]:
                continue
            if initializing and local[1][0][0] != init_id:
                continue
            rep = min(ids)
            ns, msg, _ = eng.fire(concrete, rep, rows[rep])
            out.append((eng.label(msg), ns))
        return initializing, out

    frontier = [(trans0, g0i)]
    while frontier and run.violation is None:
        results = run.map_frontier(successors, frontier)
        next_frontier = []
        for (transposed, gi), (initializing, succs) in zip(frontier, results):
            src_key = (_abstract_key(transposed), gi) if force_dynamic \
                else _abstract_key(transposed)
            src_idx = visited[src_key]
            pre_locals = _concretize(rt, transposed) if succs else None
            seen = set()
            for lab, ns in succs:
                ntrans = _transpose(rt, ns, partitions[gi])
                nkey = (_abstract_key(ntrans), gi) if force_dynamic \
                    else _abstract_key(ntrans)
                lab_id = lts.label_id(lab)
                idx = visited.get(nkey)
                if idx is None:
                    idx = lts.add_state(nkey, src_idx, lab_id)
                    visited[nkey] = idx
                    run.guard_states()
                    next_frontier.append((ntrans, gi))
                    run.check_state(nkey, idx, ns, _enabled(rt, ns)[0])
                if not initializing:
                    run.check_step(pre_locals, ns, idx)
                if (lab_id, idx) not in seen:
                    seen.add((lab_id, idx))
                    lts.add_transition(src_idx, lab_id, idx)
            if force_dynamic and not initializing:
                locals_ = _concretize(rt, transposed)
                for gj in range(k):
                    if gj == gi:
                        continue
                    ntrans = _transpose(rt, locals_, partitions[gj])
                    nkey = (_abstract_key(ntrans), gj)
                    idx = visited.get(nkey)
                    if idx is None:
                        idx = lts.add_state(nkey, src_idx, tau_id)
                        visited[nkey] = idx
                        run.guard_states()
                        next_frontier.append((ntrans, gj))
                    lts.add_transition(src_idx, tau_id, idx)
            run.guard_transitions()
            if run.violation is not None:
                break
        frontier = next_frontier

    lts.stats = {"mode": "counter", "states": lts.n_states,
                 "transitions": lts.n_transitions,
                 "topologies": k, "gamma0_replaced": replaced,
                 "wall": time.monotonic() - t0}
    lts.violation_index = run.violation
    return lts


# -- invariant driving and traces ------------------------------------------

def build_trace(rt, lts, index):
    kind = "full" if lts.mode == "full" else lts.mode
    entries = []
    for idx, lab_id in lts.path_to(index):
        lab = None if lab_id < 0 else lts.labels[lab_id]
        entries.append((lts.keys[idx], lab))
    return Trace(rt, entries, kind, topologies=lts.topologies)


def check_invariant_on_the_fly(model, mode, state_invariant=None,
                               step_invariant=None, **kwargs):
    """Explore in the given mode, stopping at the first violating state.

    Returns (lts, None) when the invariant holds over the whole space,
    else (lts, Trace) for the shortest-discovered offending path.
    """
    rt = model if isinstance(model, ModelRuntime) else ModelRuntime(model)
    explorers = {"full": explore_full, "tau-elim": explore_tau_eliminated,
                 "counter": explore_counter_abstraction}
    if mode not in explorers:
        raise ValueError(f"unknown exploration mode {mode!r}")
    lts = explorers[mode](rt, state_invariant=state_invariant,
                          step_invariant=step_invariant, **kwargs)
    if lts.violation_index is None:
        return lts, None
    return lts, build_trace(rt, lts, lts.violation_index)


def add_monitor_selfloops(lts, monitors, rt):
    """One self-loop per monitor per state, labels embedding the watched
    values in that state.  Needs concrete per-rebec states, so counter
    LTSs are not supported."""
    from .semantics import Environment, eval_expr

    if lts.mode == "counter":
        raise ValueError("monitor self-loops need concrete states")
    out = Lts(mode=lts.mode)
    out.labels = list(lts.labels)
    out._label_ids = dict(lts._label_ids)
    out.src = array("i", lts.src)
    out.lab = array("i", lts.lab)
    out.dst = array("i", lts.dst)
    out.n_states = lts.n_states
    out.keys = list(lts.keys)
    out.parent_state = array("i", lts.parent_state)
    out.parent_label = array("i", lts.parent_label)
    out.topologies = lts.topologies
    out.gamma0_index = lts.gamma0_index
    out.stats = dict(lts.stats)

    def locals_of(key):
        return key[0] if lts.mode == "full" else key

    for idx in range(lts.n_states):
        state = locals_of(lts.keys[idx])
        for mon in monitors:
            targets = range(rt.n) if mon.per_rebec else [mon.rebec or 0]
            for i in targets:
                cls = rt.rebec_class[i]
                env = Environment([dict(zip(rt.svar_names[cls],
                                            state[i][0]))])
                values = [eval_expr(e, env, i) for e in mon.exprs]
                name = mon.template.replace("{i}", str(i))
                rendered = ",".join(
                    ("true" if v else "false") if isinstance(v, bool)
                    else str(v) for v in values)
                lab_id = out.label_id(f"{name}({rendered})")
                out.add_transition(idx, lab_id, idx)
    out.stats["transitions"] = out.n_transitions
    return out


def parse_monitor(text, rt):
    """Monitor spec from its command-line form.

    Fixed rebec:  src_sn(node1.sn)
    Per rebec:    info_{i}_dsn(dsn[0],dsn[3])@each
    """
    from .invariants import (InvariantConfigError, _parse_expr,
                             _strip_rebec_prefix)

    text = text.strip()
    per_rebec = text.endswith("@each")
    if per_rebec:
        text = text[:-5].strip()
    name, _, rest = text.partition("(")
    name = name.strip()
    if not rest.endswith(")"):
        raise InvariantConfigError(f"malformed monitor {text!r}")
    parts = [p.strip() for p in rest[:-1].split(",") if p.strip()]
    if per_rebec:
        exprs = [_parse_expr(p) for p in parts]
        return Monitor(name, exprs, per_rebec=True)
    rebec = None
    exprs = []
    for p in parts:
        r, stripped = _strip_rebec_prefix(p, rt)
        if rebec is None:
            rebec = r
        elif rebec != r:
            raise InvariantConfigError(
                f"monitor {name!r} mixes variables of several rebecs")
        exprs.append(_parse_expr(stripped))
    if rebec is None:
        raise InvariantConfigError(
            f"monitor {name!r} names no rebec (use rebecName.var or @each)")
    return Monitor(name, exprs, per_rebec=False, rebec=rebec)


# -- CLTS re-expansion (the tau-elimination soundness construction) --------

def _parse_annotation(ann, names):
    """Link-status terms of a merged label; None means `true`."""
    if ann == "true":
        return []
    terms = []
    rest = ann
    while rest.startswith("and("):
        rest = rest[4:-1]
        depth = 0
        for pos, ch in enumerate(rest):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                terms.append(rest[:pos])
                rest = rest[pos + 1:]
                break
    terms.append(rest)
    ids = {name: i for i, name in enumerate(names)}
    out = []
    for t in terms:
        neg = t.startswith("!")
        body = t[1:] if neg else t
        assert body.startswith("con(") and body.endswith(")")
        a, b = body[4:-1].split(",")
        out.append((ids[a], ids[b], not neg))
    return out


def reexpand_clts(clts, rt, gamma0_index=None):
    """Pair every CLTS state with every admissible topology, turn each
    annotated transition back into a plain action under the matching
    topologies, and add mobility steps between all topology variants."""
    valid = clts.topologies
    k = len(valid)
    g0i = clts.gamma0_index if gamma0_index is None else gamma0_index
    names = rt.names
    out = Lts(mode="full")
    out.topologies = valid
    out.gamma0_index = g0i
    tau_id = out.label_id(TAU)

    # (0, g0i) must be state 0, so swap it with the raw first slot
    def index(s, gi):
        raw = s * k + gi
        if raw == g0i:
            return 0
        if raw == 0:
            return g0i
        return raw

    order = sorted(((index(s, gi), s, gi) for s in range(clts.n_states)
                    for gi in range(k)))
    for _, s, gi in order:
        out.add_state((clts.keys[s] if clts.keys else s, gi))

    for s, lab, d in zip(clts.src, clts.lab, clts.dst):
        text = clts.labels[lab]
        ann, _, action = text.partition(":")
        act_id = out.label_id(action)
        if clts.label_mode == "enumerated":
            gi = int(ann[5:]) - 1
            out.add_transition(index(s, gi), act_id, index(d, gi))
        else:
            literals = _parse_annotation(ann, names)
            for gi, gamma in enumerate(valid):
                if all(gamma.connected(a, b) == want
                       for a, b, want in literals):
                    out.add_transition(index(s, gi), act_id, index(d, gi))
    for s in range(clts.n_states):
        for gi in range(k):
            for gj in range(k):
                if gi != gj:
                    out.add_transition(index(s, gi), tau_id, index(s, gj))
    out.stats = {"mode": "reexpanded", "states": out.n_states,
                 "transitions": out.n_transitions}
    return out
