"""Finite-dimensional C*-algebras as multisets of matrix sizes.

An algebra is the direct sum of full matrix blocks M_n over a finite multiset
of sizes; a *-homomorphism between two such algebras is determined up to
unitary conjugation by its multiplicity matrix, which is also the induced map
on scaled K0 groups. Only that exact integer data is kept here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ordgrp import PosMatrix, SimplicialGroup, apply, compose, vector


class SizeViolation(ValueError):
    """Multiplicities overflow a target block: sum_j mult[i][j]*n_j > l_i."""


@dataclass(frozen=True)
class FinDimAlgebra:
    """Multiset of matrix-block sizes, canonicalized in ascending order."""

    summands: tuple  # tuple[int, ...], sorted ascending

    def __post_init__(self):
        sizes = tuple(sorted(self.summands))
        if not sizes:
            raise ValueError("algebra needs at least one summand")
        for n in sizes:
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"summand sizes must be positive ints, got {n!r}")
        object.__setattr__(self, "summands", sizes)

    def __len__(self) -> int:
        return len(self.summands)


def dim(algebra: FinDimAlgebra) -> int:
    """Linear dimension: sum of squared block sizes."""
    return sum(n * n for n in algebra.summands)


def k0(algebra: FinDimAlgebra) -> SimplicialGroup:
    """Scaled K0 group: Z^k with the block-size vector as order unit."""
    return SimplicialGroup(rank=len(algebra), unit=vector(algebra.summands))


@dataclass(frozen=True)
class AlgebraHom:
    """A *-homomorphism recorded by its multiplicity matrix.

    mult has one row per target block and one column per source block; the
    i-th row must fit inside target block i, i.e. sum_j mult[i][j]*n_j <= l_i.
    """

    source: FinDimAlgebra
    target: FinDimAlgebra
    mult: PosMatrix

    def __post_init__(self):
        if self.mult.rows != len(self.target) or self.mult.cols != len(self.source):
            raise ValueError(
                f"multiplicity matrix must be {len(self.target)}x{len(self.source)}, "
                f"got {self.mult.rows}x{self.mult.cols}"
            )
        for i, cap in enumerate(self.target.summands):
            load = sum(m * n for m, n in zip(self.mult.entries[i], self.source.summands))
            if load > cap:
                raise SizeViolation(f"target block {i} of size {cap} overflows: load {load}")

    def is_unital(self) -> bool:
        return apply(self.mult, self.source.summands) == self.target.summands

    def is_injective(self) -> bool:
        return all(any(row[j] != 0 for row in self.mult.entries) for j in range(self.mult.cols))


def k0_hom(h: AlgebraHom) -> PosMatrix:
    """Induced map on K0: the multiplicity matrix itself."""
    return h.mult


def hom_from_matrix(source: FinDimAlgebra, target: FinDimAlgebra, gamma: PosMatrix) -> AlgebraHom:
    """Realize a positive K0 matrix as a *-homomorphism, if the sizes admit it."""
    return AlgebraHom(source=source, target=target, mult=gamma)


def identity_hom(algebra: FinDimAlgebra) -> AlgebraHom:
    return AlgebraHom(algebra, algebra, PosMatrix.identity(len(algebra)))


def compose_hom(g: AlgebraHom, f: AlgebraHom) -> AlgebraHom:
    """Composite hom g after f; multiplicities multiply."""
    if f.target != g.source:
        raise ValueError("homs not composable: f.target != g.source")
    return AlgebraHom(source=f.source, target=g.target, mult=compose(g.mult, f.mult))


def is_unital(h: AlgebraHom) -> bool:
    return h.is_unital()


def is_injective(h: AlgebraHom) -> bool:
    return h.is_injective()


@dataclass(frozen=True)
class AFSequence:
    """Finite tower of finite-dimensional algebras with connecting homs.

    Only the chaining of sources and targets is enforced at construction;
    unitality and injectivity of every hom (the conditions for a genuine
    finite-depth AF presentation) are checked by validate_af_sequence.
    """

    algebras: tuple  # tuple[FinDimAlgebra, ...]
    homs: tuple  # tuple[AlgebraHom, ...]

    def __post_init__(self):
        algebras = tuple(self.algebras)
        homs = tuple(self.homs)
        if not algebras:
            raise ValueError("sequence needs at least one algebra")
        if len(homs) != len(algebras) - 1:
            raise ValueError("need exactly one hom per gap")
        for s, h in enumerate(homs):
            if h.source != algebras[s] or h.target != algebras[s + 1]:
                raise ValueError(f"hom at stage {s} does not chain the adjacent algebras")
        object.__setattr__(self, "algebras", algebras)
        object.__setattr__(self, "homs", homs)

    @property
    def depth(self) -> int:
        return len(self.homs)


def af_sequence_violation(seq: AFSequence) -> Optional[tuple]:
    """First stage with a non-unital or non-injective hom, or None if valid."""
    for s, h in enumerate(seq.homs):
        if not h.is_unital():
            return (s, "non-unital")
        if not h.is_injective():
            return (s, "non-injective")
    return None


def validate_af_sequence(seq: AFSequence) -> bool:
    """True iff every connecting hom is a unital embedding."""
    return af_sequence_violation(seq) is None


def car_sequence(depth: int) -> AFSequence:
    """The 2^infinity prefix: M_1 -> M_2 -> M_4 -> ... with doubling embeddings."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    algebras = [FinDimAlgebra((2**s,)) for s in range(depth + 1)]
    homs = [
        AlgebraHom(algebras[s], algebras[s + 1], PosMatrix(((2,),))) for s in range(depth)
    ]
    return AFSequence(tuple(algebras), tuple(homs))
