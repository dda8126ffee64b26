"""Sparse simplex interaction topologies.

A :class:`SimplexSet` stores which (n+1)-particle simplices participate in
the reduced potential. Tuples are stored canonically as sorted index sets;
the ordered-tuple semantics of the model (closure under all permutations)
is recovered exactly through factorial multiplicities:

    ordered |S|   = (n+1)! * number of stored simplices
    ordered |S_i| = n!     * number of stored simplices containing i

Indices are 0-based in memory. The line-oriented topology file format uses
1-based indices (header ``n=<n> N=<N>``, then one simplex per line as
space-separated ascending indices).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class SimplexSet:
    """Immutable symmetric set of interaction simplices.

    Attributes:
        n: simplex order (each simplex has n+1 vertices).
        N: particle count; indices run over range(N).
        simplices: sorted tuple of canonical (ascending) vertex tuples.
        neighborhoods: per particle i, the sorted tuple of unordered base
            n-tuples B with B + (i,) in the set.
    """

    n: int
    N: int
    simplices: tuple[Simplex, ...]
    neighborhoods: dict[int, tuple[Simplex, ...]] = field(compare=False)

    @property
    def ordered_size(self) -> int:
        """Number of ordered (n+1)-tuples represented (the model's |S|)."""
        return len(self.simplices) * math.factorial(self.n + 1)

    def ordered_neighborhood_size(self, i: int) -> int:
        """Number of ordered base n-tuples in S_i."""
        return len(self.neighborhoods.get(i, ())) * math.factorial(self.n)


def symmetric_closure(raw, N: int) -> SimplexSet:
    """Close a list of (n+1)-tuples under permutation and derive neighborhoods.

    Raises ValueError for out-of-range or repeated indices. The canonical
    storage already represents every permutation, so closure amounts to
    sorting and de-duplicating.
    """
    raw = [tuple(int(v) for v in t) for t in raw]
    if not raw:
        raise ValueError("empty simplex list")
    arity = len(raw[0])
    if arity < 2:
        raise ValueError("simplices need at least 2 vertices")
    n = arity - 1
    canonical = set()
    for t in raw:
        if len(t) != arity:
            raise ValueError(f"inconsistent tuple arity: {t}")
        for v in t:
            if not 0 <= v < N:
                raise ValueError(f"index {v} out of range [0, {N})")
        if len(set(t)) != arity:
            raise ValueError(f"repeated index within tuple {t}")
        canonical.add(tuple(sorted(t)))
    simplices = tuple(sorted(canonical))
    return SimplexSet(n=n, N=N, simplices=simplices, neighborhoods=_neighborhoods(simplices, N))


def full_set(N: int, n: int) -> SimplexSet:
    """All distinct-index (n+1)-simplices over N particles."""
    if N < n + 1:
        raise ValueError(f"need N >= n+1, got N={N}, n={n}")
    simplices = tuple(combinations(range(N), n + 1))
    return SimplexSet(n=n, N=N, simplices=simplices, neighborhoods=_neighborhoods(simplices, N))


def base_point_set(bases, N: int, n: int | None = None) -> SimplexSet:
    """Simplex set joining fixed base n-tuples with every other particle.

    For each base (j_1, ..., j_n) the set contains the simplex on
    {j_1, ..., j_n, i} for every i outside the base. Duplicate simplices
    arising from overlapping bases are merged.
    """
    bases = [tuple(int(v) for v in b) for b in bases]
    if not bases:
        raise ValueError("need at least one base tuple")
    if n is None:
        n = len(bases[0])
    canonical = set()
    for b in bases:
        if len(b) != n or len(set(b)) != n:
            raise ValueError(f"base tuple must have {n} distinct indices: {b}")
        for v in b:
            if not 0 <= v < N:
                raise ValueError(f"index {v} out of range [0, {N})")
        for i in range(N):
            if i not in b:
                canonical.add(tuple(sorted(b + (i,))))
    simplices = tuple(sorted(canonical))
    return SimplexSet(n=n, N=N, simplices=simplices, neighborhoods=_neighborhoods(simplices, N))


def validate(sset: SimplexSet) -> list[str]:
    """Return human-readable violations; empty list means the set is usable.

    Canonical storage guarantees permutation closure, so the checks are
    index ranges, arities, and the nonempty-neighborhood requirement
    (a particle with empty S_i would never move).
    """
    violations = []
    for s in sset.simplices:
        if len(s) != sset.n + 1:
            violations.append(f"simplex {s} has arity {len(s)}, expected {sset.n + 1}")
        if len(set(s)) != len(s):
            violations.append(f"simplex {s} has repeated indices")
        if any(not 0 <= v < sset.N for v in s):
            violations.append(f"simplex {s} has out-of-range indices for N={sset.N}")
    for i in range(sset.N):
        if not sset.neighborhoods.get(i):
            violations.append(f"S_{i} empty: particle {i} is stationary")
    return violations


def save_topology(sset: SimplexSet, path) -> None:
    """Write the topology file (1-based indices, ascending per line)."""
    lines = [f"n={sset.n} N={sset.N}"]
    for s in sset.simplices:
        lines.append(" ".join(str(v + 1) for v in s))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_topology(path) -> SimplexSet:
    """Read a topology file written by :func:`save_topology`."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"empty topology file: {path}")
    header = dict(item.split("=") for item in lines[0].split())
    try:
        n, N = int(header["n"]), int(header["N"])
    except KeyError as exc:
        raise ValueError(f"malformed topology header: {lines[0]!r}") from exc
    raw = []
    for ln in lines[1:]:
        tup = tuple(int(v) - 1 for v in ln.split())
        if len(tup) != n + 1:
            raise ValueError(f"simplex line {ln!r} has arity {len(tup)}, expected {n + 1}")
        raw.append(tup)
    sset = symmetric_closure(raw, N)
    if sset.n != n:
        raise ValueError("topology header inconsistent with simplex lines")
    return sset


def _neighborhoods(simplices, N: int) -> dict[int, tuple[Simplex, ...]]:
    """S_i = unordered bases B with B union {i} in the set, for each member i."""
    nbrs: dict[int, set[Simplex]] = {i: set() for i in range(N)}
    for s in simplices:
        for i in s:
            nbrs[i].add(tuple(v for v in s if v != i))
    return {i: tuple(sorted(bs)) for i, bs in nbrs.items()}
