"""Dimension groups presented as finite towers of simplicial groups.

A certificate is the finite-depth data (ranks, bonds, optional stage units) of
an inductive system Z^{n_0} -> Z^{n_1} -> ... along positive integer matrices.
Elements of and maps into the (unbuilt) limit are carried as (stage, vector)
and (stage, matrix) pairs; equality and positivity in the limit are only
semidecidable, so the query operations report Yes-with-witness or
unknown-at-this-depth, never an unconditional No.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .findim import AFSequence, AlgebraHom, FinDimAlgebra, af_sequence_violation, k0, k0_hom
from .ordgrp import (
    PosMatrix,
    SimplicialGroup,
    apply,
    compose,
    mat_vec,
    restrict_to_convex,
    vector,
)


class KernelWitnessNotFound(ValueError):
    """No stage within depth kills the planted kernel element."""


@dataclass(frozen=True)
class DimCertificate:
    """Finite tower of simplicial groups with positive bonding matrices.

    Stage indices run 0..depth; bonds[s] maps stage s to stage s+1. A
    certificate marked unital carries a strictly positive unit at every stage,
    transported exactly by the bonds.
    """

    stages: tuple  # tuple[SimplicialGroup, ...]
    bonds: tuple  # tuple[PosMatrix, ...]
    unital: bool = False

    def __post_init__(self):
        stages = tuple(self.stages)
        bonds = tuple(self.bonds)
        if not stages:
            raise ValueError("certificate needs at least one stage")
        if len(bonds) != len(stages) - 1:
            raise ValueError("need exactly one bond per gap")
        for s, b in enumerate(bonds):
            if b.cols != stages[s].rank or b.rows != stages[s + 1].rank:
                raise ValueError(f"bond at gap {s} does not chain the adjacent ranks")
        if self.unital:
            for s, grp in enumerate(stages):
                if not grp.has_strict_unit():
                    raise ValueError(f"unital certificate needs a strict unit at stage {s}")
            for s, b in enumerate(bonds):
                if apply(b, stages[s].unit) != stages[s + 1].unit:
                    raise ValueError(f"bond at gap {s} does not carry the unit forward")
        object.__setattr__(self, "stages", stages)
        object.__setattr__(self, "bonds", bonds)

    @property
    def depth(self) -> int:
        return len(self.bonds)

    def rank(self, s: int) -> int:
        return self.stages[s].rank

    def unit(self, s: int):
        return self.stages[s].unit

    def bond_product(self, s: int, t: int) -> PosMatrix:
        """Composite bond from stage s to stage t >= s (identity when t == s)."""
        if not 0 <= s <= t <= self.depth:
            raise ValueError(f"stages out of range: {s} -> {t}")
        out = PosMatrix.identity(self.rank(s))
        for k in range(s, t):
            out = compose(self.bonds[k], out)
        return out


@dataclass(frozen=True)
class LimitElement:
    """An element of the limit, represented at a finite stage."""

    stage: int
    vector: tuple

    def __post_init__(self):
        object.__setattr__(self, "vector", vector(self.vector))
        if self.stage < 0:
            raise ValueError("stage must be >= 0")


@dataclass(frozen=True)
class LimitHom:
    """A homomorphism Z^m -> limit, represented by a matrix at a finite stage.

    The matrix has one row per coordinate of the carrying stage and one column
    per source basis vector; positive means all entries are >= 0, so the map
    is a positive homomorphism into the limit cone.
    """

    stage: int
    matrix: tuple  # tuple[tuple[int, ...], ...], possibly signed
    positive: bool = False

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        if self.positive and any(x < 0 for r in rows for x in r):
            raise ValueError("positive limit hom needs nonnegative entries")
        object.__setattr__(self, "matrix", rows)

    @property
    def source_rank(self) -> int:
        return len(self.matrix[0])


@dataclass(frozen=True)
class Verdict3:
    """Depth-bounded answer: yes/no with a witness stage, or unknown at depth."""

    status: str
    stage: Optional[int] = None

    def __post_init__(self):
        if self.status not in ("yes", "no", "unknown"):
            raise ValueError(f"bad verdict status {self.status!r}")

    def is_yes(self) -> bool:
        return self.status == "yes"


def _check_element(cert: DimCertificate, el: LimitElement) -> None:
    if el.stage > cert.depth:
        raise ValueError(f"element stage {el.stage} exceeds certificate depth {cert.depth}")
    if len(el.vector) != cert.rank(el.stage):
        raise ValueError("element vector does not match its stage rank")


def push(cert: DimCertificate, el: LimitElement, t: int) -> tuple:
    """Representative of el at the later stage t."""
    _check_element(cert, el)
    if not el.stage <= t <= cert.depth:
        raise ValueError(f"target stage {t} out of range [{el.stage}, {cert.depth}]")
    v = el.vector
    for k in range(el.stage, t):
        v = mat_vec(cert.bonds[k].entries, v)
    return v


def eq_at_depth(cert: DimCertificate, a: LimitElement, b: LimitElement) -> Verdict3:
    """Yes with the least common stage where the pushes agree; else unknown.

    Never answers no: disagreement at every stage up to depth does not rule
    out a merging stage beyond it.
    """
    _check_element(cert, a)
    _check_element(cert, b)
    start = max(a.stage, b.stage)
    for t in range(start, cert.depth + 1):
        if push(cert, a, t) == push(cert, b, t):
            return Verdict3("yes", t)
    return Verdict3("unknown", cert.depth)


def positive_at_depth(cert: DimCertificate, a: LimitElement) -> Verdict3:
    """Yes with the least stage where the push lands in the coordinate cone."""
    _check_element(cert, a)
    for t in range(a.stage, cert.depth + 1):
        if all(x >= 0 for x in push(cert, a, t)):
            return Verdict3("yes", t)
    return Verdict3("unknown", cert.depth)


def shen_factor(cert: DimCertificate, theta: LimitHom, alpha: Sequence[int]):
    """Factor a positive limit hom through a stage that kills alpha.

    Pushes theta forward until theta.matrix @ alpha dies, then returns the
    pushed matrix phi (so phi @ alpha = 0) together with theta' represented by
    the identity at the witness stage, giving theta = theta' o phi exactly.
    """
    if not theta.positive:
        raise ValueError("shen_factor needs a positive limit hom")
    if not 0 <= theta.stage <= cert.depth:
        raise ValueError("theta stage out of range")
    if len(theta.matrix) != cert.rank(theta.stage):
        raise ValueError("theta matrix does not match its stage rank")
    al = vector(alpha)
    if len(al) != theta.source_rank:
        raise ValueError("alpha length does not match theta source rank")
    w = mat_vec(theta.matrix, al)
    t = theta.stage
    for k in range(cert.depth - t + 1):
        if all(x == 0 for x in w):
            stage = t + k
            phi = compose(cert.bond_product(t, stage), PosMatrix(theta.matrix))
            theta_prime = LimitHom(
                stage=stage,
                matrix=PosMatrix.identity(cert.rank(stage)).entries,
                positive=True,
            )
            return phi, theta_prime
        if t + k < cert.depth:
            w = mat_vec(cert.bonds[t + k].entries, w)
    raise KernelWitnessNotFound(
        f"theta.matrix @ alpha survives every stage up to depth {cert.depth}"
    )


def unitalize(cert: DimCertificate) -> DimCertificate:
    """Cut a unit-carrying tower down to the convex subgroups of its units.

    Stage units may have zero components; the result keeps only the
    coordinates where the unit is positive, so its units are strict and it is
    a unital certificate.
    """
    units = []
    for s, grp in enumerate(cert.stages):
        if grp.unit is None:
            raise ValueError(f"stage {s} has no unit")
        units.append(grp.unit)
    for s, b in enumerate(cert.bonds):
        if apply(b, units[s]) != units[s + 1]:
            raise ValueError(f"bond at gap {s} does not carry the unit forward")
    new_stages = []
    for s, u in enumerate(units):
        kept = [x for x in u if x >= 1]
        if not kept:
            raise ValueError(f"unit at stage {s} is zero: empty convex basis")
        new_stages.append(SimplicialGroup(rank=len(kept), unit=tuple(kept)))
    new_bonds = tuple(
        restrict_to_convex(cert.bonds[s], units[s], units[s + 1]) for s in range(cert.depth)
    )
    return DimCertificate(tuple(new_stages), new_bonds, unital=True)


def certificate_of_af(seq: AFSequence) -> DimCertificate:
    """K0 tower of an AF sequence: ranks, block-size units, multiplicity bonds."""
    bad = af_sequence_violation(seq)
    if bad is not None:
        raise ValueError(f"invalid AF sequence at stage {bad[0]}: {bad[1]}")
    stages = tuple(k0(F) for F in seq.algebras)
    bonds = tuple(k0_hom(h) for h in seq.homs)
    return DimCertificate(stages, bonds, unital=True)


def _sort_perm(values: Sequence[int]) -> tuple:
    """positions[i] = original index of the i-th smallest value (stable)."""
    return tuple(sorted(range(len(values)), key=lambda j: (values[j], j)))


def af_of_certificate(cert: DimCertificate) -> AFSequence:
    """AF sequence whose K0 tower is the given certificate.

    Unital certificates round-trip exactly when their stage units are sorted
    ascending (the canonical form certificate_of_af produces); unsorted stages
    are canonicalized by a stable sort. Certificates without the unital flag
    get synthesized units: all ones at stage 0, then componentwise
    max(bond @ unit, 1), the minimal deterministic choice dominating the push.
    """
    if cert.unital:
        units = [cert.unit(s) for s in range(cert.depth + 1)]
    else:
        units = [tuple([1] * cert.rank(0))]
        for s in range(cert.depth):
            pushed = apply(cert.bonds[s], units[s])
            units.append(tuple(max(x, 1) for x in pushed))
    algebras = [FinDimAlgebra(u) for u in units]
    homs = []
    for s in range(cert.depth):
        rowperm = _sort_perm(units[s + 1])
        colperm = _sort_perm(units[s])
        mult = PosMatrix(
            tuple(
                tuple(cert.bonds[s].entries[rowperm[i]][colperm[j]] for j in range(len(colperm)))
                for i in range(len(rowperm))
            )
        )
        homs.append(AlgebraHom(algebras[s], algebras[s + 1], mult))
    return AFSequence(tuple(algebras), tuple(homs))
