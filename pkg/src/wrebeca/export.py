"""Serialization: Aldebaran .aut files, trace files, state tables.

The .aut format: a header `des (initial, transitions, states)` followed
by one `(src, "label", dst)` line per transition.  Labels are quoted
with backslash escapes; lines are emitted sorted by (src, label, dst),
so equal inputs produce byte-identical files.
"""

from __future__ import annotations

import io

from .errors import WrebecaError
from .explorer import Lts


class AldebaranFormatError(WrebecaError):
    def __init__(self, message, line_no):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _escape(label):
    return label.replace("\\", "\\\\").replace('"', '\\"')


def _unescape(text):
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            out.append(text[i + 1])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _open_sink(sink):
    if hasattr(sink, "write"):
        return sink, False
    return open(sink, "w"), True


def write_aldebaran(lts, sink):
    """Write an LTS; transitions sorted by (src, label, dst)."""
    if lts.n_states == 0:
        raise WrebecaError("refusing to write an empty LTS")
    fh, close = _open_sink(sink)
    try:
        fh.write(f"des ({lts.initial}, {lts.n_transitions}, "
                 f"{lts.n_states})\n")
        rows = sorted((s, lts.labels[l], d)
                      for s, l, d in zip(lts.src, lts.lab, lts.dst))
        for s, label, d in rows:
            fh.write(f'({s}, "{_escape(label)}", {d})\n')
    finally:
        if close:
            fh.close()


def read_aldebaran(source):
    """Inverse of write_aldebaran up to transition ordering."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source) as fh:
            text = fh.read()
    lines = text.splitlines()
    if not lines:
        raise AldebaranFormatError("empty document", 1)
    head = lines[0].strip()
    if not (head.startswith("des") and "(" in head and head.endswith(")")):
        raise AldebaranFormatError(f"bad header {head!r}", 1)
    try:
        init, m, n = (int(x) for x in
                      head[head.index("(") + 1:-1].split(","))
    except ValueError:
        raise AldebaranFormatError(f"bad header {head!r}", 1) from None
    lts = Lts(mode="imported")
    lts.n_states = n
    lts.initial = init
    lts.keys = [None] * n
    if not 0 <= init < n:
        raise AldebaranFormatError("initial state outside state range", 1)
    count = 0
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if not (line.startswith("(") and line.endswith(")")):
            raise AldebaranFormatError(f"bad transition {line!r}", line_no)
        body = line[1:-1]
        try:
            src_text, rest = body.split(",", 1)
            rest = rest.strip()
            if not rest.startswith('"'):
                raise ValueError
            # find the closing quote, honoring escapes
            i = 1
            while i < len(rest):
                if rest[i] == "\\":
                    i += 2
                    continue
                if rest[i] == '"':
                    break
                i += 1
            label = _unescape(rest[1:i])
            dst_text = rest[i + 1:].lstrip(", ").strip()
            src, dst = int(src_text), int(dst_text)
        except ValueError:
            raise AldebaranFormatError(f"bad transition {line!r}",
                                       line_no) from None
        if not (0 <= src < n and 0 <= dst < n):
            raise AldebaranFormatError("transition endpoint outside state "
                                       "range", line_no)
        lts.add_transition(src, lts.label_id(label), dst)
        count += 1
    if count != m:
        raise AldebaranFormatError(
            f"header announces {m} transitions, found {count}", len(lines))
    return lts


def dump_state(rt, key, kind):
    """One state as text, `(env, <queue>)` per rebec plus the topology."""
    if kind == "full":
        locals_, gi = key[0], key[1]
        return rt.dump_state(locals_, gamma=None), gi
    return rt.dump_state(key), None


def write_trace(trace, sink):
    """Readable alternation of state dumps and action labels.

    Format (stable): `state <k>:` then the per-rebec dumps indented, a
    `topology:` edge list for topology-carrying states, and between
    states a `--label-->` line.
    """
    if not trace.entries:
        raise WrebecaError("refusing to write an empty trace")
    fh, close = _open_sink(sink)
    rt = trace.rt
    try:
        for k, (key, label) in enumerate(trace.entries):
            if label is not None:
                fh.write(f"--{label}-->\n")
            if trace.kind == "full":
                locals_, gi = key
                gamma = trace.topologies[gi]
            else:
                locals_, gamma = key, None
            fh.write(f"state {k}:\n")
            for line in rt.dump_state(locals_).splitlines():
                fh.write(f"  {line}\n")
            if gamma is not None:
                edges = " ".join(f"{i}-{j}" for i, j in gamma.edges())
                fh.write(f"  topology: {edges or '(none)'}\n")
    finally:
        if close:
            fh.close()


def write_states_sidecar(lts, rt, sink):
    """Map state indices to single-line dumps (.aut carries no states)."""
    fh, close = _open_sink(sink)
    try:
        for idx in range(lts.n_states):
            key = lts.keys[idx]
            if lts.mode == "full":
                locals_, gi = key
                gamma = lts.topologies[gi]
                edges = ",".join(f"{i}-{j}" for i, j in gamma.edges())
                extra = f" | topology {edges or '(none)'}"
            elif lts.mode == "counter":
                fh.write(f"state {idx}: {key!r}\n")
                continue
            else:
                locals_, extra = key, ""
            line = "; ".join(rt.dump_state(locals_).splitlines())
            fh.write(f"state {idx}: {line}{extra}\n")
    finally:
        if close:
            fh.close()
