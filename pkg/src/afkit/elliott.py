"""Depth-bounded intertwining between two simplicial-group towers.

Given two unital towers with matching limit K-theory, an intertwining witness
is a pair of stage selections together with positive unit-preserving matrices
alpha_s (tower A into tower B) and beta_s (back) whose composites recover the
bonding matrices exactly. Everything is exact integer arithmetic; searches
are bounded and deterministic, returning the least witness under the
documented candidate order (stages ascending, then matrix entries in row-major
lexicographic order).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .dimgroup import DimCertificate, LimitElement, LimitHom, eq_at_depth
from .ordgrp import PosMatrix, apply, compose, mat_mul, mat_vec


class SeedNotFound(ValueError):
    """No positive unit-preserving starting map exists at any stage pair."""


class StageSearchExhausted(RuntimeError):
    """Search budget or stage supply ran out before the requested depth."""

    def __init__(self, message: str, partial: "ZigzagWitness"):
        super().__init__(message)
        self.partial = partial


class LiftNotFound(ValueError):
    """No stage within depth carries the hom to a nonnegative representative."""


class DefectNotKilled(ValueError):
    """The lift disagrees with the bond composite at every stage within depth."""


@dataclass(frozen=True)
class ZigzagWitness:
    """Stage selections and matrices of a two-sided intertwining.

    With K = len(betas) completed rounds: alpha_s maps stage n_stages[s] of
    tower A to stage m_stages[s] of tower B for s <= K, and beta_s maps stage
    m_stages[s] back to stage n_stages[s+1] for s < K. The defining identities
    are beta_s . alpha_s = (A-bond product over [n_s, n_{s+1}]) and
    alpha_{s+1} . beta_s = (B-bond product over [m_s, m_{s+1}]). They are
    checked by verify_zigzag rather than at construction, so corrupted
    witnesses can be represented and rejected.
    """

    n_stages: tuple  # length K+1, strictly increasing
    m_stages: tuple  # length K+1, strictly increasing
    alphas: tuple  # K+1 PosMatrix
    betas: tuple  # K PosMatrix

    def __post_init__(self):
        n = tuple(self.n_stages)
        m = tuple(self.m_stages)
        a = tuple(self.alphas)
        b = tuple(self.betas)
        if len(n) != len(a) or len(m) != len(a) or len(b) != max(len(a) - 1, 0):
            raise ValueError("witness arrays have inconsistent lengths")
        object.__setattr__(self, "n_stages", n)
        object.__setattr__(self, "m_stages", m)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "betas", b)

    @property
    def depth(self) -> int:
        return len(self.betas)


def swap_witness(w: ZigzagWitness) -> ZigzagWitness:
    """Exchange the two towers, shifting the witness by half a round.

    The betas become the forward maps of the swapped witness, so its depth
    drops by one.
    """
    K = w.depth
    if K < 1:
        raise ValueError("cannot swap a witness with no completed round")
    return ZigzagWitness(
        n_stages=w.m_stages[:K],
        m_stages=w.n_stages[1 : K + 1],
        alphas=w.betas,
        betas=tuple(w.alphas[1:K]),
    )


def _row_solutions(
    product_rows: Optional[Sequence[Sequence[int]]],
    target: Optional[Sequence[int]],
    weights: Sequence[int],
    unit_target: int,
) -> Iterator[tuple]:
    """Nonnegative integer rows x with x @ product_rows == target and x . weights == unit_target.

    weights must be strictly positive, which bounds every coordinate; rows
    come out in ascending lexicographic order.
    """
    q = len(weights)
    p = len(target) if target is not None else 0
    x = [0] * q
    partial = [0] * p

    def rec(j: int, unit_left: int) -> Iterator[tuple]:
        if j == q:
            if unit_left == 0 and (target is None or partial == list(target)):
                yield tuple(x)
            return
        bound = unit_left // weights[j]
        for val in range(bound + 1):
            x[j] = val
            if val and target is not None:
                for t in range(p):
                    partial[t] += val * product_rows[j][t]
            if target is None or all(partial[t] <= target[t] for t in range(p)):
                yield from rec(j + 1, unit_left - val * weights[j])
            if val and target is not None:
                for t in range(p):
                    partial[t] -= val * product_rows[j][t]
        x[j] = 0

    yield from rec(0, unit_target)


def _matrix_solutions(
    product: Optional[PosMatrix],
    target: Optional[PosMatrix],
    weights: Sequence[int],
    unit_targets: Sequence[int],
) -> Iterator[PosMatrix]:
    """Matrices whose row i solves row @ product == target.row(i), row . weights == unit_targets[i]."""
    per_row = []
    for i, c in enumerate(unit_targets):
        rows = list(
            _row_solutions(
                product.entries if product is not None else None,
                target.entries[i] if target is not None else None,
                weights,
                c,
            )
        )
        if not rows:
            return
        per_row.append(rows)
    for combo in itertools.product(*per_row):
        yield PosMatrix(tuple(combo))


class _Budget:
    def __init__(self, nodes: int):
        self.left = nodes

    def spend(self) -> bool:
        if self.left <= 0:
            return False
        self.left -= 1
        return True


def intertwine_stage(
    cert: DimCertificate,
    mu: LimitHom,
    gamma: PosMatrix,
    r: int,
    min_stage: Optional[int] = None,
):
    """One intertwining step: find (t, delta) with delta.gamma = bond(r,t) and nu_t.delta = mu.

    Requires the triangle nu_r = mu . gamma to hold at depth on every basis
    vector. The search lifts mu to the first stage >= min_stage carrying a
    nonnegative representative, then pushes forward until the defect against
    the bond composite dies, so delta . gamma equals the bond product exactly
    and nu_t . delta = mu holds with equal representatives at stage t.
    min_stage defaults to mu's own stage; callers needing strict stage
    progression pass a larger value.
    """
    if not 0 <= r <= cert.depth or not 0 <= mu.stage <= cert.depth:
        raise ValueError("stage out of range")
    if gamma.cols != cert.rank(r):
        raise ValueError("gamma does not start at stage r")
    if gamma.rows != mu.source_rank:
        raise ValueError("gamma target rank does not match mu source rank")
    if len(mu.matrix) != cert.rank(mu.stage):
        raise ValueError("mu matrix does not match its stage rank")

    for j in range(cert.rank(r)):
        basis = tuple(1 if i == j else 0 for i in range(cert.rank(r)))
        through_mu = mat_vec(mu.matrix, gamma.column(j))
        verdict = eq_at_depth(cert, LimitElement(r, basis), LimitElement(mu.stage, through_mu))
        if not verdict.is_yes():
            raise ValueError(f"nu_r = mu . gamma not witnessed at depth on basis vector {j + 1}")

    start = max(mu.stage, min_stage if min_stage is not None else mu.stage)
    lifted = None
    for t in range(start, cert.depth + 1):
        pushed = mat_mul(cert.bond_product(mu.stage, t).entries, mu.matrix)
        if all(x >= 0 for row in pushed for x in row):
            lifted = (t, pushed)
            break
    if lifted is None:
        raise LiftNotFound(f"no nonnegative representative of mu at stages {start}..{cert.depth}")

    t_prime, delta0 = lifted
    defect = tuple(
        tuple(f - d for f, d in zip(frow, drow))
        for frow, drow in zip(cert.bond_product(r, t_prime).entries, mat_mul(delta0, gamma.entries))
    )
    for k in range(cert.depth - t_prime + 1):
        if all(x == 0 for row in defect for x in row):
            t = t_prime + k
            delta = PosMatrix(mat_mul(cert.bond_product(t_prime, t).entries, delta0))
            return t, delta
        if t_prime + k < cert.depth:
            defect = mat_mul(cert.bonds[t_prime + k].entries, defect)
    raise DefectNotKilled(f"defect of the lift survives every stage up to depth {cert.depth}")


def build_zigzag(
    certA: DimCertificate,
    certB: DimCertificate,
    depth: int,
    seed: Optional[tuple] = None,
    budget: int = 100_000,
    require_full: bool = False,
) -> ZigzagWitness:
    """Search for an intertwining witness with the requested number of rounds.

    Both certificates must be unital. The witness starts at stage 0 of tower A
    with a unit-preserving seed alpha_0, supplied as (m0, matrix) or searched
    for. Candidates are explored in ascending lexicographic order (stage, then
    row-major entries), so the result is the least witness under that order.
    When the stage supply or the node budget runs out before the requested
    depth, the deepest partial witness found is returned (or, with
    require_full, StageSearchExhausted carrying it is raised); raises
    SeedNotFound when not even alpha_0 exists.
    """
    if not (certA.unital and certB.unital):
        raise ValueError("build_zigzag needs unital certificates")
    if depth < 0:
        raise ValueError("depth must be >= 0")

    budget_box = _Budget(budget)
    best: list = [None]

    def record(ns, ms, alphas, betas):
        w = ZigzagWitness(tuple(ns), tuple(ms), tuple(alphas), tuple(betas))
        if best[0] is None or w.depth > best[0].depth:
            best[0] = w

    def seed_candidates() -> Iterator[tuple]:
        if seed is not None:
            m0, alpha0 = seed
            if not 0 <= m0 <= certB.depth:
                raise ValueError("seed stage out of range")
            if alpha0.rows != certB.rank(m0) or alpha0.cols != certA.rank(0):
                raise ValueError("seed alpha has the wrong shape")
            if apply(alpha0, certA.unit(0)) != certB.unit(m0):
                raise ValueError("seed alpha is not unit-preserving")
            yield m0, alpha0
            return
        u0 = certA.unit(0)
        for m0 in range(certB.depth + 1):
            for alpha0 in _matrix_solutions(None, None, u0, certB.unit(m0)):
                if not budget_box.spend():
                    return
                yield m0, alpha0

    def extend(ns, ms, alphas, betas) -> Optional[ZigzagWitness]:
        record(ns, ms, alphas, betas)
        if len(betas) == depth:
            return ZigzagWitness(tuple(ns), tuple(ms), tuple(alphas), tuple(betas))
        n_cur, m_cur = ns[-1], ms[-1]
        for n_next in range(n_cur + 1, certA.depth + 1):
            f = certA.bond_product(n_cur, n_next)
            for beta in _matrix_solutions(alphas[-1], f, certB.unit(m_cur), certA.unit(n_next)):
                if not budget_box.spend():
                    return None
                for m_next in range(m_cur + 1, certB.depth + 1):
                    g = certB.bond_product(m_cur, m_next)
                    for alpha in _matrix_solutions(beta, g, certA.unit(n_next), certB.unit(m_next)):
                        if not budget_box.spend():
                            return None
                        got = extend(ns + [n_next], ms + [m_next], alphas + [alpha], betas + [beta])
                        if got is not None:
                            return got
                    if budget_box.left <= 0:
                        return None
        return None

    seeded = False
    for m0, alpha0 in seed_candidates():
        seeded = True
        got = extend([0], [m0], [alpha0], [])
        if got is not None:
            return got
        if budget_box.left <= 0:
            break
    if not seeded:
        raise SeedNotFound("no positive unit-preserving seed map exists within the stage supply")
    if require_full:
        raise StageSearchExhausted(
            f"search stopped at depth {best[0].depth} of the requested {depth}", best[0]
        )
    return best[0]


def zigzag_violation(
    w: ZigzagWitness, certA: DimCertificate, certB: DimCertificate
) -> Optional[str]:
    """First broken invariant of the witness, re-derived by exact arithmetic."""
    if not w.alphas:
        return None
    K = w.depth
    for s in range(K):
        if w.n_stages[s + 1] <= w.n_stages[s]:
            return f"A-stages not strictly increasing at round {s}"
        if w.m_stages[s + 1] <= w.m_stages[s]:
            return f"B-stages not strictly increasing at round {s}"
    if not 0 <= w.n_stages[0] or w.n_stages[-1] > certA.depth:
        return "A-stage selection out of range"
    if not 0 <= w.m_stages[0] or w.m_stages[-1] > certB.depth:
        return "B-stage selection out of range"
    for s, alpha in enumerate(w.alphas):
        n_s, m_s = w.n_stages[s], w.m_stages[s]
        if alpha.rows != certB.rank(m_s) or alpha.cols != certA.rank(n_s):
            return f"alpha_{s} has the wrong shape"
        if apply(alpha, certA.unit(n_s)) != certB.unit(m_s):
            return f"alpha_{s} is not unit-preserving"
    for s, beta in enumerate(w.betas):
        m_s, n_next = w.m_stages[s], w.n_stages[s + 1]
        if beta.rows != certA.rank(n_next) or beta.cols != certB.rank(m_s):
            return f"beta_{s} has the wrong shape"
        if apply(beta, certB.unit(m_s)) != certA.unit(n_next):
            return f"beta_{s} is not unit-preserving"
    for s in range(K):
        f = certA.bond_product(w.n_stages[s], w.n_stages[s + 1])
        if compose(w.betas[s], w.alphas[s]) != f:
            return f"beta_{s} . alpha_{s} differs from the A-bond product"
        g = certB.bond_product(w.m_stages[s], w.m_stages[s + 1])
        if compose(w.alphas[s + 1], w.betas[s]) != g:
            return f"alpha_{s + 1} . beta_{s} differs from the B-bond product"
    return None


def verify_zigzag(w: ZigzagWitness, certA: DimCertificate, certB: DimCertificate) -> bool:
    """Recheck every witness identity from scratch by exact matrix arithmetic."""
    return zigzag_violation(w, certA, certB) is None
