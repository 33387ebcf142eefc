"""Labeled Bratteli diagrams as finite-depth data.

A diagram is a sequence of levels (vertex labels) and one edge matrix per gap,
rows indexed by the deeper level, so telescoping is matrix multiplication from
the left. Diagrams here are finite prefixes of the infinite objects they
approximate; every verdict an operation returns is qualified by the depth it
inspected and never claims anything about levels that were not supplied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

from .dimgroup import DimCertificate
from .findim import AFSequence, AlgebraHom, FinDimAlgebra, af_sequence_violation
from .ordgrp import PosMatrix, compose


class ConsistencyError(ValueError):
    """A vertex whose label breaks the unital recursion or has no out-edges."""

    def __init__(self, vertex, message: str):
        super().__init__(f"vertex {vertex}: {message}")
        self.vertex = vertex


@dataclass(frozen=True)
class LabeledBratteliDiagram:
    """Finite-depth leveled multigraph with nonnegative integer vertex labels.

    edges[k] has one row per level-(k+1) vertex and one column per level-k
    vertex; the entry is the number of edges between them. The unital flag
    asserts that labels satisfy label(v) = sum_u E(u,v)*label(u) at every
    non-root vertex, which consistency_violation rechecks.
    """

    levels: tuple  # tuple[tuple[int, ...], ...]
    edges: tuple  # tuple[PosMatrix, ...]
    unital: bool = False

    def __post_init__(self):
        levels = tuple(tuple(level) for level in self.levels)
        edges = tuple(self.edges)
        if not levels:
            raise ValueError("diagram needs at least one level")
        for level in levels:
            if not level:
                raise ValueError("levels must be nonempty")
            for x in level:
                if not isinstance(x, int) or x < 0:
                    raise ValueError(f"labels must be nonnegative ints, got {x!r}")
        if len(edges) != len(levels) - 1:
            raise ValueError("need exactly one edge matrix per gap")
        for k, e in enumerate(edges):
            if e.cols != len(levels[k]) or e.rows != len(levels[k + 1]):
                raise ValueError(f"edge matrix at gap {k} does not match the level sizes")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "edges", edges)

    @property
    def depth(self) -> int:
        return len(self.edges)

    def label(self, level: int, index: int) -> int:
        return self.levels[level][index]


@dataclass(frozen=True)
class TelescopeSpec:
    """Strictly increasing level selection starting at level 0."""

    stages: tuple

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages or stages[0] != 0:
            raise ValueError("telescope spec must start at level 0")
        for a, b in zip(stages, stages[1:]):
            if b <= a:
                raise ValueError("telescope spec must be strictly increasing")
        object.__setattr__(self, "stages", stages)


def _check_vertex(diagram: LabeledBratteliDiagram, v) -> tuple:
    level, index = v
    if not 0 <= level < len(diagram.levels) or not 0 <= index < len(diagram.levels[level]):
        raise ValueError(f"vertex {v!r} out of range")
    return level, index


def path_count(diagram: LabeledBratteliDiagram, u, v) -> int:
    """Number of downward paths from u to v (0 when v is not strictly deeper)."""
    lu, iu = _check_vertex(diagram, u)
    lv, iv = _check_vertex(diagram, v)
    if lu >= lv:
        return 0
    counts = {(lu, iu): 1}
    for level in range(lu, lv):
        edge = diagram.edges[level]
        nxt: dict = {}
        for (_, j), c in counts.items():
            for i in range(edge.rows):
                w = edge.entries[i][j]
                if w:
                    nxt[(level + 1, i)] = nxt.get((level + 1, i), 0) + c * w
        counts = nxt
    return counts.get((lv, iv), 0)


def path_matrix(diagram: LabeledBratteliDiagram, k: int, k2: int) -> PosMatrix:
    """Edge-matrix product over the gap [k, k2]; entry (i,j) counts paths (k,j) -> (k2,i)."""
    if not 0 <= k <= k2 <= diagram.depth:
        raise ValueError(f"levels out of range: {k} -> {k2}")
    out = PosMatrix.identity(len(diagram.levels[k]))
    for gap in range(k, k2):
        out = compose(diagram.edges[gap], out)
    return out


def telescope(diagram: LabeledBratteliDiagram, spec) -> LabeledBratteliDiagram:
    """Select the spec'd levels, replacing edges by path counts between them."""
    if not isinstance(spec, TelescopeSpec):
        spec = TelescopeSpec(tuple(spec))
    if spec.stages[-1] > diagram.depth:
        raise ValueError("telescope spec exceeds diagram depth")
    levels = tuple(diagram.levels[n] for n in spec.stages)
    edges = tuple(
        path_matrix(diagram, spec.stages[i], spec.stages[i + 1])
        for i in range(len(spec.stages) - 1)
    )
    return LabeledBratteliDiagram(levels, edges, unital=diagram.unital)


def consistency_violation(diagram: LabeledBratteliDiagram) -> Optional[tuple]:
    """First vertex breaking the label recursion, or None.

    Non-root labels must dominate sum_u E(u,v)*label(u), with equality when
    the diagram is marked unital.
    """
    for k, edge in enumerate(diagram.edges):
        for i in range(edge.rows):
            total = sum(edge.entries[i][j] * diagram.levels[k][j] for j in range(edge.cols))
            have = diagram.levels[k + 1][i]
            if diagram.unital and have != total:
                return ((k + 1, i), f"label {have} != incoming mass {total}")
            if not diagram.unital and have < total:
                return ((k + 1, i), f"label {have} < incoming mass {total}")
    return None


def diagram_of_af_sequence(seq: AFSequence) -> LabeledBratteliDiagram:
    """Standard diagram of an AF sequence: block sizes label the levels, multiplicities are edges."""
    bad = af_sequence_violation(seq)
    if bad is not None:
        raise ValueError(f"invalid AF sequence at stage {bad[0]}: {bad[1]}")
    levels = tuple(F.summands for F in seq.algebras)
    edges = tuple(h.mult for h in seq.homs)
    return LabeledBratteliDiagram(levels, edges, unital=True)


def _sort_perm(values: Sequence[int]) -> tuple:
    return tuple(sorted(range(len(values)), key=lambda j: (values[j], j)))


def af_sequence_of_diagram(diagram: LabeledBratteliDiagram) -> AFSequence:
    """Read an AF sequence back off a unital diagram with positive labels.

    Inverse of diagram_of_af_sequence on its image; levels whose labels are
    not already ascending are canonicalized by a stable sort. Raises
    ConsistencyError naming the offending vertex when the labels do not
    satisfy the exact unital recursion, are not positive, or a vertex below
    the last level has no outgoing edges (the connecting hom would not be
    injective).
    """
    if not diagram.unital:
        raise ValueError("diagram is not marked unital")
    for k, level in enumerate(diagram.levels):
        for j, x in enumerate(level):
            if x < 1:
                raise ConsistencyError((k, j), f"label {x} < 1")
    bad = consistency_violation(diagram)
    if bad is not None:
        raise ConsistencyError(bad[0], bad[1])
    for k, edge in enumerate(diagram.edges):
        for j in range(edge.cols):
            if all(edge.entries[i][j] == 0 for i in range(edge.rows)):
                raise ConsistencyError((k, j), "no outgoing edges")
    algebras = [FinDimAlgebra(level) for level in diagram.levels]
    homs = []
    for k, edge in enumerate(diagram.edges):
        rowperm = _sort_perm(diagram.levels[k + 1])
        colperm = _sort_perm(diagram.levels[k])
        mult = PosMatrix(
            tuple(
                tuple(edge.entries[rowperm[i]][colperm[j]] for j in range(edge.cols))
                for i in range(edge.rows)
            )
        )
        homs.append(AlgebraHom(algebras[k], algebras[k + 1], mult))
    return AFSequence(tuple(algebras), tuple(homs))


def diagram_of_simplicial_tower(cert: DimCertificate) -> LabeledBratteliDiagram:
    """Standard diagram of a unit-carrying tower: units label the levels, bonds are edges."""
    levels = []
    for s, grp in enumerate(cert.stages):
        if grp.unit is None:
            raise ValueError(f"stage {s} has no unit")
        levels.append(grp.unit)
    unital = all(
        tuple(sum(b.entries[i][j] * levels[s][j] for j in range(b.cols)) for i in range(b.rows))
        == tuple(levels[s + 1])
        for s, b in enumerate(cert.bonds)
    )
    return LabeledBratteliDiagram(tuple(levels), cert.bonds, unital=unital)


@dataclass(frozen=True)
class SimplicityVerdict:
    """Depth-qualified connectivity report.

    witnessed means every vertex above the last level reaches all vertices of
    some deeper level within the inspected depth; otherwise blocked names the
    first vertex (level-major order) with no such level. Neither outcome
    decides simplicity of the infinite completion.
    """

    witnessed: bool
    depth: int
    blocked: Optional[tuple] = None


def simplicity_window(diagram: LabeledBratteliDiagram) -> SimplicityVerdict:
    """Check full-connectivity windows for every vertex within depth."""
    T = diagram.depth
    for n in range(T):
        reach = PosMatrix.identity(len(diagram.levels[n]))
        ok = [False] * len(diagram.levels[n])
        for m in range(n + 1, T + 1):
            reach = compose(diagram.edges[m - 1], reach)
            for j in range(len(diagram.levels[n])):
                if not ok[j] and all(reach.entries[i][j] > 0 for i in range(reach.rows)):
                    ok[j] = True
        for j, good in enumerate(ok):
            if not good:
                return SimplicityVerdict(witnessed=False, depth=T, blocked=(n, j))
    return SimplicityVerdict(witnessed=True, depth=T)


def supernatural_prefix(diagram: LabeledBratteliDiagram, depth: Optional[int] = None) -> dict:
    """Prime-exponent map of the product of edge multiplicities up to depth.

    Only defined for single-vertex levels (telescope first); the result is a
    finite lower approximation of the supernatural number of the limit.
    """
    gaps = diagram.depth if depth is None else min(depth, diagram.depth)
    for k in range(gaps + 1):
        if len(diagram.levels[k]) != 1:
            raise ValueError(f"level {k} has {len(diagram.levels[k])} vertices; telescope first")
    from sympy import factorint

    out: dict = {}
    for k in range(gaps):
        entry = diagram.edges[k].entries[0][0]
        if entry == 0:
            raise ValueError(f"zero edge multiplicity at gap {k}")
        for p, e in factorint(entry).items():
            out[int(p)] = out.get(int(p), 0) + int(e)
    return out


def gen_car(depth: int) -> LabeledBratteliDiagram:
    """Doubling tower: one vertex per level, labels 2^s, two edges per gap."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    levels = tuple((2**s,) for s in range(depth + 1))
    edges = tuple(PosMatrix(((2,),)) for _ in range(depth))
    return LabeledBratteliDiagram(levels, edges, unital=True)


def gen_trace_diagram(halting, depth: int) -> LabeledBratteliDiagram:
    """Diagram tracing a halting table: strands split on stalls, merge on growth.

    halting maps inputs to their halting step count (>= 1), with None (or
    absence) for inputs that never halt; a sequence is read as the table for
    inputs 0, 1, 2, .... m(s) counts how many initial inputs have halted
    within s steps. Level s+1 has one vertex when m grew at step s+1 and two
    otherwise; edges and labels follow the fixed rules: a single vertex feeds
    every vertex of the next level, while in a two-vertex level vertex 0 feeds
    the next vertex 0 and vertex 1 feeds the highest next vertex. The root is
    labeled 1 and every other label is the sum over its in-neighbors.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if isinstance(halting, Mapping):
        table = dict(halting)
    else:
        table = {i: v for i, v in enumerate(halting)}
    for x, st in table.items():
        if st is not None and (not isinstance(st, int) or st < 1):
            raise ValueError(f"halting step count for input {x} must be an int >= 1 or None")

    def m_of(s: int) -> int:
        y = 0
        while True:
            st = table.get(y)
            if st is None or st > s:
                return y
            y += 1

    sizes = [1]
    for s in range(depth):
        sizes.append(1 if m_of(s) < m_of(s + 1) else 2)

    edges = []
    for s in range(depth):
        rows = [[0] * sizes[s] for _ in range(sizes[s + 1])]
        if sizes[s] == 1:
            for i in range(sizes[s + 1]):
                rows[i][0] += 1
        else:
            rows[0][0] += 1
            rows[sizes[s + 1] - 1][1] += 1
        edges.append(PosMatrix(tuple(tuple(r) for r in rows)))

    labels = [(1,)]
    for s in range(depth):
        edge = edges[s]
        labels.append(
            tuple(
                sum(labels[s][j] for j in range(edge.cols) if edge.entries[i][j] > 0)
                for i in range(edge.rows)
            )
        )
    return LabeledBratteliDiagram(tuple(labels), tuple(edges), unital=True)


@dataclass(frozen=True)
class WitnessStep:
    """One replay step: telescope or relabel one side of the pair."""

    side: str  # "left" | "right"
    op: str  # "telescope" | "iso"
    stages: Optional[tuple] = None
    maps: Optional[tuple] = None  # per-level permutations, maps[l][i] = new index of (l, i)

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError(f"bad side {self.side!r}")
        if self.op == "telescope":
            if self.stages is None:
                raise ValueError("telescope step needs stages")
            object.__setattr__(self, "stages", tuple(self.stages))
        elif self.op == "iso":
            if self.maps is None:
                raise ValueError("iso step needs maps")
            object.__setattr__(self, "maps", tuple(tuple(m) for m in self.maps))
        else:
            raise ValueError(f"bad op {self.op!r}")


@dataclass(frozen=True)
class EquivalenceWitness:
    """Chain of telescoping/isomorphism steps equating two diagrams.

    Replaying the steps against the pair (left, right) must make both sides
    byte-identical; an empty chain witnesses equality.
    """

    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


def apply_iso(diagram: LabeledBratteliDiagram, maps: Sequence[Sequence[int]]) -> LabeledBratteliDiagram:
    """Relabel vertices level by level along the given permutations."""
    if len(maps) != len(diagram.levels):
        raise ValueError("need one permutation per level")
    perms = []
    for l, perm in enumerate(maps):
        perm = tuple(perm)
        if sorted(perm) != list(range(len(diagram.levels[l]))):
            raise ValueError(f"map at level {l} is not a permutation")
        perms.append(perm)
    levels = []
    for l, perm in enumerate(perms):
        row = [0] * len(perm)
        for i, x in enumerate(diagram.levels[l]):
            row[perm[i]] = x
        levels.append(tuple(row))
    edges = []
    for k, edge in enumerate(diagram.edges):
        rows = [[0] * edge.cols for _ in range(edge.rows)]
        for r in range(edge.rows):
            for c in range(edge.cols):
                rows[perms[k + 1][r]][perms[k][c]] = edge.entries[r][c]
        edges.append(PosMatrix(tuple(tuple(r) for r in rows)))
    return LabeledBratteliDiagram(tuple(levels), tuple(edges), unital=diagram.unital)


def replay_equivalence(
    witness: EquivalenceWitness,
    left: LabeledBratteliDiagram,
    right: LabeledBratteliDiagram,
) -> bool:
    """Apply the witness steps and test the two sides for exact equality."""
    try:
        for step in witness.steps:
            cur = left if step.side == "left" else right
            if step.op == "telescope":
                cur = telescope(cur, step.stages)
            else:
                cur = apply_iso(cur, step.maps)
            if step.side == "left":
                left = cur
            else:
                right = cur
    except (ValueError, IndexError):
        return False
    return left == right


def _label_bijections(a: Sequence[int], b: Sequence[int]) -> Iterator[tuple]:
    """Label-preserving bijections pi with b[pi[j]] == a[j], lexicographically ascending."""
    n = len(a)
    if n != len(b) or sorted(a) != sorted(b):
        return
    used = [False] * n
    pi = [0] * n

    def rec(j: int) -> Iterator[tuple]:
        if j == n:
            yield tuple(pi)
            return
        for i in range(n):
            if not used[i] and b[i] == a[j]:
                used[i] = True
                pi[j] = i
                yield from rec(j + 1)
                used[i] = False

    yield from rec(0)


def equivalence_search(
    d1: LabeledBratteliDiagram,
    d2: LabeledBratteliDiagram,
    budget: int = 100_000,
) -> Optional[EquivalenceWitness]:
    """Search for an exact equivalence witness between two unital diagrams.

    The search runs the two-tower intertwining at the K0 level specialized to
    invertible stage maps: it looks for level selections of both diagrams,
    covering level 0 and the full depth of each side, together with
    label-preserving vertex bijections under which the path matrices agree.
    Any such match converts into telescoping plus relabeling steps whose
    replay equates the diagrams exactly. Exhausting the node budget, or the
    stage supply, returns None, which means unknown; it never asserts
    inequivalence.
    """
    for d in (d1, d2):
        if not d.unital:
            raise ValueError("equivalence search needs diagrams marked unital")
        bad = consistency_violation(d)
        if bad is not None:
            raise ConsistencyError(bad[0], bad[1])
    if d1 == d2:
        return EquivalenceWitness(())

    T1, T2 = d1.depth, d2.depth
    if sorted(d1.levels[0]) != sorted(d2.levels[0]):
        return None
    if sorted(d1.levels[T1]) != sorted(d2.levels[T2]):
        return None

    pm1: dict = {}
    pm2: dict = {}

    def pmat(diagram, cache, a, b):
        got = cache.get((a, b))
        if got is None:
            got = path_matrix(diagram, a, b)
            cache[(a, b)] = got
        return got

    budget_left = [budget]
    dead: set = set()

    def dfs(n: int, m: int, pi: tuple, chain: list):
        if n == T1 and m == T2:
            return list(chain)
        key = (n, m, pi)
        if key in dead:
            return None
        for n2 in range(n + 1, T1 + 1):
            for m2 in range(m + 1, T2 + 1):
                if budget_left[0] <= 0:
                    return None
                budget_left[0] -= 1
                p1 = pmat(d1, pm1, n, n2)
                p2 = pmat(d2, pm2, m, m2)
                for pi2 in _label_bijections(d1.levels[n2], d2.levels[m2]):
                    if budget_left[0] <= 0:
                        return None
                    budget_left[0] -= 1
                    if all(
                        p2.entries[pi2[r]][pi[c]] == p1.entries[r][c]
                        for r in range(p1.rows)
                        for c in range(p1.cols)
                    ):
                        got = dfs(n2, m2, pi2, chain + [(n2, m2, pi2)])
                        if got is not None:
                            return got
        dead.add(key)
        return None

    for pi0 in _label_bijections(d1.levels[0], d2.levels[0]):
        if budget_left[0] <= 0:
            return None
        budget_left[0] -= 1
        chain = dfs(0, 0, pi0, [(0, 0, pi0)])
        if chain is not None:
            nspec = tuple(n for n, _, _ in chain)
            mspec = tuple(m for _, m, _ in chain)
            perms = tuple(p for _, _, p in chain)
            steps = []
            if nspec != tuple(range(T1 + 1)):
                steps.append(WitnessStep("left", "telescope", stages=nspec))
            if mspec != tuple(range(T2 + 1)):
                steps.append(WitnessStep("right", "telescope", stages=mspec))
            if any(p != tuple(range(len(p))) for p in perms):
                steps.append(WitnessStep("left", "iso", maps=perms))
            return EquivalenceWitness(tuple(steps))
    return None
