"""Connectivity matrices, network constraints, and node equivalence.

A topology over n nodes is a symmetric boolean adjacency matrix with a
true diagonal (every node can always unicast to itself).  Only the
strict upper triangle is free, so it is stored as a bit vector over the
pairs (0,1), (0,2), ..., (n-2,n-1).  The pair (0,1) occupies the most
significant bit, which makes plain integer comparison coincide with
lexicographic order over the upper triangle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .syntax import ConAnd, ConLink, ConTrue


def _pair_index(i, j, n):
    if i > j:
        i, j = j, i
    # pairs (0,1)..(0,n-1), (1,2).. in row-major order
    return (i * (2 * n - i - 1)) // 2 + (j - i - 1)


@dataclass(frozen=True)
class Topology:
    n: int
    bits: int  # upper-triangle links, pair (0,1) at the most significant bit

    @staticmethod
    def pair_count(n):
        return n * (n - 1) // 2

    @classmethod
    def from_edges(cls, n, edges):
        bits = 0
        npairs = cls.pair_count(n)
        for i, j in edges:
            if i == j:
                continue
            bits |= 1 << (npairs - 1 - _pair_index(i, j, n))
        return cls(n, bits)

    @classmethod
    def fully_connected(cls, n):
        return cls(n, (1 << cls.pair_count(n)) - 1)

    @classmethod
    def disconnected(cls, n):
        return cls(n, 0)

    def connected(self, i, j):
        if i == j:
            return True
        p = _pair_index(i, j, self.n)
        return bool(self.bits >> (self.pair_count(self.n) - 1 - p) & 1)

    def edges(self):
        return tuple((i, j) for i in range(self.n) for j in range(i + 1, self.n)
                     if self.connected(i, j))

    def rows(self):
        """Per-node neighbor masks, bit j of row i set iff connected(i, j).

        The diagonal bit is included, matching the always-1 diagonal.
        """
        out = []
        for i in range(self.n):
            row = 0
            for j in range(self.n):
                if self.connected(i, j):
                    row |= 1 << j
            out.append(row)
        return tuple(out)

    def matrix(self):
        return tuple(tuple(1 if self.connected(i, j) else 0 for j in range(self.n))
                     for i in range(self.n))

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in row) for row in self.matrix())


@dataclass(frozen=True)
class EquivClassPartition:
    """Maximal groups of nodes sharing the same neighbors besides each other."""

    blocks: tuple  # of frozensets covering 0..n-1

    def block_of(self, i):
        for b, ids in enumerate(self.blocks):
            if i in ids:
                return b
        raise KeyError(i)


def topologically_equivalent(gamma, i, j):
    """True iff i and j have identical adjacency outside the pair itself."""
    return all(gamma.connected(i, k) == gamma.connected(j, k)
               for k in range(gamma.n) if k != i and k != j)


def equivalence_classes(gamma):
    """Partition nodes into maximal pairwise topologically equivalent sets.

    Greedy by identifier: each unassigned node opens a block and absorbs
    every later node equivalent to all current members, which keeps the
    result deterministic and maximal (no two blocks can merge).
    """
    assigned = [False] * gamma.n
    blocks = []
    for i in range(gamma.n):
        if assigned[i]:
            continue
        members = [i]
        assigned[i] = True
        for j in range(i + 1, gamma.n):
            if assigned[j]:
                continue
            if all(topologically_equivalent(gamma, m, j) for m in members):
                members.append(j)
                assigned[j] = True
        blocks.append(frozenset(members))
    return EquivClassPartition(tuple(blocks))


def satisfies(gamma, constraint, name_to_id=None):
    """gamma |= constraint, by structural recursion over the four forms."""
    if isinstance(constraint, ConTrue):
        return True
    if isinstance(constraint, ConLink):
        i = name_to_id[constraint.a] if name_to_id else int(constraint.a)
        j = name_to_id[constraint.b] if name_to_id else int(constraint.b)
        bit = gamma.connected(i, j)
        return not bit if constraint.negated else bit
    if isinstance(constraint, ConAnd):
        return (satisfies(gamma, constraint.left, name_to_id)
                and satisfies(gamma, constraint.right, name_to_id))
    raise TypeError(f"not a constraint: {constraint!r}")


def pinned_links(constraint, name_to_id):
    """Collect the required link values; None when contradictory."""
    pinned = {}

    def walk(c):
        if isinstance(c, ConTrue):
            return True
        if isinstance(c, ConLink):
            i, j = name_to_id[c.a], name_to_id[c.b]
            key = (min(i, j), max(i, j))
            want = not c.negated
            if pinned.get(key, want) != want:
                return False
            pinned[key] = want
            return True
        return walk(c.left) and walk(c.right)

    if not walk(constraint):
        return None
    return pinned


def enumerate_valid(constraint, n, name_to_id=None):
    """All valid topologies, ascending in the canonical (lexicographic) order."""
    if name_to_id is None:
        name_to_id = {}
    pinned = pinned_links(constraint, name_to_id)
    if pinned is None:
        return []
    npairs = Topology.pair_count(n)
    base = 0
    free = []
    for i in range(n):
        for j in range(i + 1, n):
            pos = npairs - 1 - _pair_index(i, j, n)
            want = pinned.get((i, j))
            if want is None:
                free.append(pos)
            elif want:
                base |= 1 << pos
    # free positions are produced in pair order, i.e. descending bit
    # positions, so counting through assignments stays lexicographic
    out = []
    for k in range(1 << len(free)):
        bits = base
        for idx, pos in enumerate(free):
            if k >> (len(free) - 1 - idx) & 1:
                bits |= 1 << pos
        out.append(Topology(n, bits))
    out.sort(key=lambda t: t.bits)
    return out


def is_static(constraint, gamma0, name_to_id=None):
    """True iff gamma0 is the only topology the constraint admits."""
    valid = enumerate_valid(constraint, gamma0.n, name_to_id)
    return valid == [gamma0]


@lru_cache(maxsize=None)
def neighbor_table(n):
    """neighbor_table(n)[i][row] lists the k != i with bit k set in row."""
    table = []
    for i in range(n):
        per_row = []
        for row in range(1 << n):
            per_row.append(tuple(k for k in range(n) if k != i and row >> k & 1))
        table.append(per_row)
    return table
