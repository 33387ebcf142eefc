"""Simplicial ordered groups: Z^n with the coordinatewise positive cone.

Group elements are tuples of Python ints (arbitrary precision), and positive
homomorphisms between simplicial groups are nonnegative integer matrices
acting on column vectors, so a map Z^n -> Z^p is stored as a p x n matrix.
Everything here is immutable and exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

IntVector = tuple  # tuple[int, ...]; rank >= 1


def vector(entries: Iterable[int]) -> IntVector:
    """Coerce a sequence of ints to a validated vector."""
    v = tuple(entries)
    if not v:
        raise ValueError("vector must have length >= 1")
    for x in v:
        if not isinstance(x, int):
            raise TypeError(f"vector entries must be ints, got {x!r}")
    return v


def _check_same_length(a: IntVector, b: IntVector) -> None:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")


@dataclass(frozen=True)
class PosMatrix:
    """Nonnegative integer matrix; a positive homomorphism Z^cols -> Z^rows.

    Doubles as the multiplicity matrix of a *-homomorphism between
    finite-dimensional algebras and as the edge matrix of one gap of a
    Bratteli diagram (rows indexed by the deeper level).
    """

    entries: tuple  # tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged matrix")
            for x in row:
                if not isinstance(x, int):
                    raise TypeError(f"matrix entries must be ints, got {x!r}")
                if x < 0:
                    raise ValueError(f"negative entry {x} in positive matrix")
        object.__setattr__(self, "entries", rows)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @staticmethod
    def identity(n: int) -> "PosMatrix":
        if n < 1:
            raise ValueError("identity needs n >= 1")
        return PosMatrix(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def row(self, i: int) -> IntVector:
        return self.entries[i]

    def column(self, j: int) -> IntVector:
        return tuple(row[j] for row in self.entries)

    def is_identity(self) -> bool:
        return self.rows == self.cols and all(
            x == (1 if i == j else 0) for i, row in enumerate(self.entries) for j, x in enumerate(row)
        )

    def is_permutation(self) -> bool:
        """True iff the matrix permutes the standard basis."""
        if self.rows != self.cols:
            return False
        seen = set()
        for row in self.entries:
            ones = [j for j, x in enumerate(row) if x == 1]
            if len(ones) != 1 or any(x not in (0, 1) for x in row):
                return False
            seen.add(ones[0])
        return len(seen) == self.rows

    def permutation(self) -> tuple:
        """For a permutation matrix, the map j -> image index i with m[i][j] = 1."""
        if not self.is_permutation():
            raise ValueError("not a permutation matrix")
        out = [0] * self.cols
        for i, row in enumerate(self.entries):
            out[row.index(1)] = i
        return tuple(out)


@dataclass(frozen=True)
class SimplicialGroup:
    """Z^rank with the coordinatewise cone, optionally scaled by a unit vector.

    A strict unit (every component >= 1) is an order unit of the whole group;
    units with zero components are tolerated as inputs to unitalization and
    are flagged by has_strict_unit() = False.
    """

    rank: int
    unit: Optional[IntVector] = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.unit is not None:
            u = vector(self.unit)
            if len(u) != self.rank:
                raise ValueError("unit length must equal rank")
            if any(x < 0 for x in u):
                raise ValueError("unit components must be nonnegative")
            object.__setattr__(self, "unit", u)

    def has_strict_unit(self) -> bool:
        return self.unit is not None and all(x >= 1 for x in self.unit)


def compose(a: PosMatrix, b: PosMatrix) -> PosMatrix:
    """Exact matrix product a . b (apply b first, then a)."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.rows}x{a.cols} . {b.rows}x{b.cols}")
    return PosMatrix(
        tuple(
            tuple(sum(a.entries[i][k] * b.entries[k][j] for k in range(a.cols)) for j in range(b.cols))
            for i in range(a.rows)
        )
    )


def apply(m: PosMatrix, v: Sequence[int]) -> IntVector:
    """Exact matrix-vector product m . v."""
    if m.cols != len(v):
        raise ValueError(f"dimension mismatch: {m.rows}x{m.cols} applied to length {len(v)}")
    return tuple(sum(row[j] * v[j] for j in range(m.cols)) for row in m.entries)


def mat_vec(rows: Sequence[Sequence[int]], v: Sequence[int]) -> IntVector:
    """Matrix-vector product for raw (possibly signed) integer matrices."""
    if not rows or len(rows[0]) != len(v):
        raise ValueError("dimension mismatch")
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in rows)


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> tuple:
    """Matrix product for raw (possibly signed) integer matrices."""
    if len(a[0]) != len(b):
        raise ValueError("dimension mismatch")
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    )


def is_order_unit(u: Sequence[int]) -> bool:
    """Decide whether u scales all of Z^n: every component must be >= 1."""
    return all(isinstance(x, int) and x >= 1 for x in vector(u))


def convex_member(x: Sequence[int], g: Sequence[int]) -> bool:
    """Membership of g in the convex subgroup generated by x >= 0.

    Some positive n satisfies -n*x <= g <= n*x iff g vanishes wherever x does;
    on the support of x any n >= max|g_j|/x_j works.
    """
    xv, gv = vector(x), vector(g)
    _check_same_length(xv, gv)
    if any(c < 0 for c in xv):
        raise ValueError("generator x must be nonnegative")
    if all(c == 0 for c in xv):
        raise ValueError("generator x must be nonzero")
    return all(gj == 0 for xj, gj in zip(xv, gv) if xj == 0)


def convex_basis(u: Sequence[int]) -> tuple:
    """1-based indices j with u_j >= 1; the standard basis of the convex subgroup of u."""
    uv = vector(u)
    if any(c < 0 for c in uv):
        raise ValueError("u must be nonnegative")
    return tuple(j + 1 for j, x in enumerate(uv) if x >= 1)


def restrict_to_convex(phi: PosMatrix, u_src: Sequence[int], u_tgt: Sequence[int]) -> PosMatrix:
    """Matrix of phi restricted to the convex subgroups generated by the units.

    Keeps the rows/columns indexed by convex_basis of the units and demands
    that deleted rows carry no mass from kept columns (otherwise the image
    leaves the target subgroup and the restriction does not exist).
    """
    us, ut = vector(u_src), vector(u_tgt)
    if phi.cols != len(us) or phi.rows != len(ut):
        raise ValueError("unit lengths must match matrix shape")
    keep_cols = [j - 1 for j in convex_basis(us)]
    keep_rows = [i - 1 for i in convex_basis(ut)]
    if not keep_cols or not keep_rows:
        raise ValueError("empty convex basis: unit generates the trivial subgroup")
    for i in range(phi.rows):
        if i in keep_rows:
            continue
        for j in keep_cols:
            if phi.entries[i][j] != 0:
                raise ValueError(
                    f"image leaves the target convex subgroup: entry ({i + 1},{j + 1}) nonzero"
                )
    return PosMatrix(tuple(tuple(phi.entries[i][j] for j in keep_cols) for i in keep_rows))
