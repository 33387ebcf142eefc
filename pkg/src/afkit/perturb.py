"""Perturbation moduli as exact rationals, and a numeric matrix-unit layer.

The delta/Delta functions are recursive rational formulas evaluated exactly
with fractions.Fraction; they say how close an almost-structure must sit to a
subalgebra for a genuine structure to exist nearby, together with the precise
power-of-two distances. The numeric layer realizes matrix-unit systems in
M_d(C) with double precision and builds the exchange and conjugation
unitaries, so the claimed norm bounds can be measured on concrete instances.

Exchange construction note: the raw block operator 1 - p - q + 2qp
intertwines p and q exactly but is only approximately unitary (its defect is
quadratic in ||p - q||), so exchange_unitary applies the polar correction to
each block before assembling; the uncorrected operator, with either sign, is
exposed as exchange_block_operator for direct inspection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .findim import FinDimAlgebra

Rat = Fraction


class PerturbationPreconditionError(ValueError):
    """An input violates a stated closeness or structure bound."""


class MultiplicityMismatch(ValueError):
    """Two realizations embed the blocks with different multiplicities."""


# ---------------------------------------------------------------------------
# exact moduli


def _as_eps(eps) -> Fraction:
    e = Fraction(eps)
    if not 0 < e < 1:
        raise ValueError(f"eps must lie in (0, 1), got {e}")
    return e


def delta0(eps, n: int) -> Fraction:
    """Closeness needed for n mutually orthogonal projections to snap into a subalgebra."""
    e = _as_eps(eps)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return min(e / 2, Fraction(1, 2))
    return min(e / (4 * n), delta0(e / (12 * n * n), n - 1), Fraction(1))


def delta1(eps, n: int) -> Fraction:
    """Almost-orthogonality threshold under which projections can be disentangled."""
    e = _as_eps(eps)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return Fraction(1, 2)
    m = n - 1
    return min(Fraction(1, 3), e / (48 * m), delta1(e / (48 * m), m))


def delta2(eps, n: int) -> Fraction:
    """Closeness needed for an n x n system of matrix units to snap into a subalgebra."""
    e = _as_eps(eps)
    if n < 1:
        raise ValueError("n must be >= 1")
    return min(Fraction(1, 5), e * (8 - 5 * e), delta1(e, n))


def _least_power_below(value: Fraction) -> int:
    """Least N >= 0 with 2^-N < value."""
    if value <= 0:
        raise ValueError("value must be positive")
    n = 0
    while Fraction(1, 2**n) >= value:
        n += 1
    return n


def Delta1(n: int, k: int) -> int:
    """Least N with 2^-N < delta0(2^-(k+1), n); 0 for the unused n = 0 case."""
    if n == 0:
        return 0
    return _least_power_below(delta0(Fraction(1, 2 ** (k + 1)), n))


def Delta2(n: int, k: int) -> int:
    return n + k + 2


def Delta3(n: int, k: int) -> int:
    """Least N with 2^-N < delta2(2^-(k+1), n); 0 for the unused n = 0 case."""
    if n == 0:
        return 0
    return _least_power_below(delta2(Fraction(1, 2 ** (k + 1)), n))


def Delta4(n: int, k: int) -> int:
    inner = max(Delta3(np_, k) for np_ in range(n + 1)) if n >= 0 else 0
    first = max(Delta1(m, inner + 2) for m in range(k + 1))
    return max(first, 1 + inner)


def square_partitions(n: int) -> tuple:
    """All multisets of positive integers whose squares sum to n, as ascending tuples."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []

    def rec(remaining: int, minimum: int, acc: list):
        if remaining == 0:
            out.append(tuple(acc))
            return
        j = minimum
        while j * j <= remaining:
            acc.append(j)
            rec(remaining - j * j, j, acc)
            acc.pop()
            j += 1

    rec(n, 1, [])
    return tuple(out)


def DeltaGlimm(n: int, k: int) -> int:
    """Closeness exponent under which a near-inclusion can be conjugated inside.

    Maximizes the chained moduli over every square partition of n, with the
    distance exponent k0 = ceil(log2(n * 2^(k+1))).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    k0 = (n * 2 ** (k + 1) - 1).bit_length()
    return max(Delta4(n, Delta2(sum(parts), k0)) for parts in square_partitions(n))


# ---------------------------------------------------------------------------
# numeric layer


def operator_norm(m) -> float:
    """Largest singular value; the C*-norm of a complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


@dataclass(frozen=True, eq=False)
class MatrixUnitSystem:
    """Arrays e^s_{i,j} in a common M_d, one block of size n_s per s.

    units[s][i][j] is a d x d complex matrix; an exact system satisfies the
    matrix-unit relations within each block, kills cross-block products, and,
    when flagged unital, sums its diagonal elements to the identity. defect()
    measures how far a concrete array is from exactness.
    """

    sizes: tuple
    units: tuple
    unital: bool

    def __post_init__(self):
        sizes = tuple(self.sizes)
        if any(not isinstance(n, int) or n < 1 for n in sizes):
            raise ValueError("block sizes must be positive ints")
        units = tuple(
            tuple(tuple(np.asarray(e, dtype=complex) for e in row) for row in block)
            for block in self.units
        )
        if len(units) != len(sizes):
            raise ValueError("one unit block per size")
        dim = None
        for n, block in zip(sizes, units):
            if len(block) != n or any(len(row) != n for row in block):
                raise ValueError("unit block shape must match its size")
            for row in block:
                for e in row:
                    if e.ndim != 2 or e.shape[0] != e.shape[1]:
                        raise ValueError("units must be square matrices")
                    if dim is None:
                        dim = e.shape[0]
                    elif e.shape[0] != dim:
                        raise ValueError("all units must share the ambient dimension")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "units", units)

    @property
    def dim(self) -> int:
        if not self.units:
            return 0
        return self.units[0][0][0].shape[0]

    def unit(self, s: int, i: int, j: int) -> np.ndarray:
        return self.units[s][i][j]

    def diagonal_projections(self) -> list:
        """Block sums p_s = sum_i e^s_{i,i}."""
        return [sum(self.units[s][i][i] for i in range(n)) for s, n in enumerate(self.sizes)]


def canonical_matrix_units(algebra: FinDimAlgebra) -> MatrixUnitSystem:
    """Standard block-diagonal matrix units of the algebra inside M_(sum of sizes)."""
    d = sum(algebra.summands)
    units = []
    offset = 0
    for n in algebra.summands:
        block = []
        for i in range(n):
            row = []
            for j in range(n):
                e = np.zeros((d, d), dtype=complex)
                e[offset + i, offset + j] = 1.0
                row.append(e)
            block.append(tuple(row))
        units.append(tuple(block))
        offset += n
    return MatrixUnitSystem(sizes=algebra.summands, units=tuple(units), unital=True)


def embedded_matrix_units(hom) -> MatrixUnitSystem:
    """Images of the source's canonical units under the block-diagonal form of a hom.

    Inside each target block the source blocks are repeated along the diagonal
    according to the multiplicity matrix, with any slack space left zero; the
    system is unital exactly when the hom is.
    """
    d = sum(hom.target.summands)
    sizes = hom.source.summands
    units = [
        [[np.zeros((d, d), dtype=complex) for _ in range(n)] for _ in range(n)] for n in sizes
    ]
    block_offset = 0
    for t, cap in enumerate(hom.target.summands):
        inner = 0
        for s, n in enumerate(sizes):
            for _ in range(hom.mult.entries[t][s]):
                for i in range(n):
                    for j in range(n):
                        units[s][i][j][block_offset + inner + i, block_offset + inner + j] = 1.0
                inner += n
        block_offset += cap
    frozen = tuple(tuple(tuple(e for e in row) for row in block) for block in units)
    return MatrixUnitSystem(sizes=sizes, units=frozen, unital=hom.is_unital())


def defect(system: MatrixUnitSystem) -> float:
    """Largest residual of the matrix-unit relations, adjoints included.

    Covers products within and across blocks, the self-adjointness pairing
    e_{i,j}^* = e_{j,i}, and, for systems flagged unital, the residual of the
    diagonal sum against the identity.
    """
    flat = [
        (s, i, j, system.units[s][i][j])
        for s, n in enumerate(system.sizes)
        for i in range(n)
        for j in range(n)
    ]
    if not flat:
        return 0.0
    d = system.dim
    worst = 0.0
    for s, i, j, e in flat:
        worst = max(worst, operator_norm(e.conj().T - system.units[s][j][i]))
    for s, i, j, e in flat:
        for s2, i2, j2, f in flat:
            prod = e @ f
            if s == s2 and j == i2:
                prod = prod - system.units[s][i][j2]
            worst = max(worst, operator_norm(prod))
    if system.unital:
        total = sum(system.units[s][i][i] for s, n in enumerate(system.sizes) for i in range(n))
        worst = max(worst, operator_norm(total - np.eye(d)))
    return worst


def exchange_block_operator(p: np.ndarray, q: np.ndarray, sign: int = 1) -> np.ndarray:
    """Raw exchange operator 1 - p - q + sign*2*q@p, without unitarization.

    With sign=+1 this intertwines p into q (z p = q z) and equals the
    identity at p = q; sign=-1 reproduces the variant that fails unitarity
    (at p = q it degenerates to 1 - 4p).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    d = p.shape[0]
    return np.eye(d) + (-p - q + sign * 2 * (q @ p))


def _polar_unitary(z: np.ndarray) -> np.ndarray:
    """Unitary polar factor z (z*z)^(-1/2); z must be invertible."""
    w, v = np.linalg.eigh(z.conj().T @ z)
    if w[0] <= 0:
        raise ValueError("operator is singular; no polar unitary")
    return z @ (v * (w ** -0.5)) @ v.conj().T


def _check_projections(mats: Sequence[np.ndarray], tag: str, tol: float = 1e-9) -> None:
    for idx, p in enumerate(mats):
        if operator_norm(p - p.conj().T) > tol:
            raise PerturbationPreconditionError(f"{tag}[{idx}] is not self-adjoint within {tol}")
        if operator_norm(p @ p - p) > tol:
            raise PerturbationPreconditionError(f"{tag}[{idx}] is not idempotent within {tol}")
    for a in range(len(mats)):
        for b in range(len(mats)):
            if a != b and operator_norm(mats[a] @ mats[b]) > tol:
                raise PerturbationPreconditionError(
                    f"{tag}[{a}] and {tag}[{b}] are not orthogonal within {tol}"
                )


def exchange_unitary(ps: Sequence[np.ndarray], qs: Sequence[np.ndarray], k: int) -> np.ndarray:
    """Unitary v close to 1 with v* p_j v = q_j for paired projection families.

    Requires two families of mutually orthogonal projections with sum(p) = 1
    and max ||p_j - q_j|| below 2^-(n+k+2); then ||v - 1|| < 2^-k. Built
    blockwise from polar-corrected exchange operators, so the conjugation
    identities hold to machine precision rather than to the raw quadratic
    defect.
    """
    if len(ps) != len(qs) or not ps:
        raise ValueError("need equally many p's and q's")
    n = len(ps)
    ps = [np.asarray(p, dtype=complex) for p in ps]
    qs = [np.asarray(q, dtype=complex) for q in qs]
    d = ps[0].shape[0]
    _check_projections(ps, "p")
    _check_projections(qs, "q")
    if operator_norm(sum(ps) - np.eye(d)) > 1e-9:
        raise PerturbationPreconditionError("sum of p_j is not the identity within 1e-9")
    threshold = 2.0 ** -Delta2(n, k)
    gap = max(operator_norm(p - q) for p, q in zip(ps, qs))
    if gap >= threshold:
        raise PerturbationPreconditionError(
            f"max ||p_j - q_j|| = {gap:.3e} is not below 2^-Delta2 = {threshold:.3e}"
        )
    v = np.zeros((d, d), dtype=complex)
    for p, q in zip(ps, qs):
        u = _polar_unitary(exchange_block_operator(p, q, sign=1)).conj().T
        v = v + p @ u @ q
    return v


def glimm_unitary(
    g: MatrixUnitSystem, h: MatrixUnitSystem, v: np.ndarray
) -> np.ndarray:
    """Assemble u = sum g^s_{i,1} v h^s_{1,i}, conjugating system g onto system h.

    v must already conjugate the diagonal units of g onto those of h (within
    1e-8); both systems must be unital and of the same type.
    """
    if g.sizes != h.sizes:
        raise ValueError(f"type mismatch: {g.sizes} vs {h.sizes}")
    if g.dim != h.dim:
        raise ValueError("ambient dimensions differ")
    if not (g.unital and h.unital):
        raise PerturbationPreconditionError("both systems must be unital")
    v = np.asarray(v, dtype=complex)
    for s, n in enumerate(g.sizes):
        for i in range(n):
            err = operator_norm(v.conj().T @ g.unit(s, i, i) @ v - h.unit(s, i, i))
            if err > 1e-8:
                raise PerturbationPreconditionError(
                    f"v does not carry diagonal unit ({s},{i}) within 1e-8 (residual {err:.3e})"
                )
    d = g.dim
    u = np.zeros((d, d), dtype=complex)
    for s, n in enumerate(g.sizes):
        for i in range(n):
            u = u + g.unit(s, i, 0) @ v @ h.unit(s, 0, i)
    return u


def unitary_intertwiner(r1: MatrixUnitSystem, r2: MatrixUnitSystem) -> np.ndarray:
    """Unitary U with U (r1 units) U* = (r2 units), for two realizations of one embedding.

    Matches orthonormal bases of the ranges of the corner projections
    e^s_{1,1} block by block; this exists exactly when the two realizations
    have the same multiplicity on every block and are both unital.
    """
    if r1.sizes != r2.sizes:
        raise MultiplicityMismatch(f"type mismatch: {r1.sizes} vs {r2.sizes}")
    if r1.dim != r2.dim:
        raise ValueError("ambient dimensions differ")
    d = r1.dim
    mults = []
    for s in range(len(r1.sizes)):
        m1 = int(round(np.trace(r1.unit(s, 0, 0)).real))
        m2 = int(round(np.trace(r2.unit(s, 0, 0)).real))
        if m1 != m2:
            raise MultiplicityMismatch(f"block {s}: multiplicity {m1} vs {m2}")
        mults.append(m1)
    for r in (r1, r2):
        total = sum(r.unit(s, i, i) for s, n in enumerate(r.sizes) for i in range(n))
        if operator_norm(total - np.eye(d)) > 1e-8:
            raise PerturbationPreconditionError("realization is not unital within 1e-8")

    def corner_basis(system: MatrixUnitSystem, s: int, want: int) -> np.ndarray:
        w, vecs = np.linalg.eigh(system.unit(s, 0, 0))
        cols = [c for c in range(len(w)) if w[c] > 0.5]
        if len(cols) != want:
            raise PerturbationPreconditionError(
                f"corner projection of block {s} has rank {len(cols)}, expected {want}"
            )
        return vecs[:, cols]

    u = np.zeros((d, d), dtype=complex)
    for s, n in enumerate(r1.sizes):
        if mults[s] == 0:
            continue
        x = corner_basis(r1, s, mults[s])
        y = corner_basis(r2, s, mults[s])
        for i in range(n):
            a = r1.unit(s, i, 0) @ x
            b = r2.unit(s, i, 0) @ y
            u = u + b @ a.conj().T
    return u


def conjugate_system(system: MatrixUnitSystem, u: np.ndarray) -> MatrixUnitSystem:
    """The system with every unit replaced by u e u*."""
    units = tuple(
        tuple(tuple(u @ e @ u.conj().T for e in row) for row in block) for block in system.units
    )
    return MatrixUnitSystem(sizes=system.sizes, units=units, unital=system.unital)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via the phase-fixed QR of a complex Gaussian."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def nearby_unitary(d: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    """Unitary within operator distance `scale` of the identity."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    herm = (z + z.conj().T) / 2
    norm = operator_norm(herm)
    if norm == 0:
        return np.eye(d, dtype=complex)
    herm = herm / norm
    w, vecs = np.linalg.eigh(herm)
    return (vecs * np.exp(1j * scale * w)) @ vecs.conj().T


# ---------------------------------------------------------------------------
# seeded demo instances (shared by the CLI and the test suite)


def exchange_demo(n: int, k: int, d: int, seed: int) -> dict:
    """One seeded exchange instance; reports each bound next to its measurement."""
    if d < n:
        raise ValueError("need d >= n to fit n orthogonal projections")
    rng = np.random.default_rng(seed)
    cuts = sorted(rng.choice(np.arange(1, d), size=n - 1, replace=False).tolist()) if n > 1 else []
    bounds = [0] + cuts + [d]
    w = haar_unitary(d, rng)
    ps = []
    for a, b in zip(bounds, bounds[1:]):
        e = np.zeros((d, d), dtype=complex)
        e[a:b, a:b] = np.eye(b - a)
        ps.append(w @ e @ w.conj().T)
    threshold = 2.0 ** -Delta2(n, k)
    u_small = nearby_unitary(d, threshold / 4, rng)
    qs = [u_small @ p @ u_small.conj().T for p in ps]
    v = exchange_unitary(ps, qs, k)
    measured_identity = operator_norm(v.conj().T @ v - np.eye(d))
    measured_conj = max(
        operator_norm(v.conj().T @ p @ v - q) for p, q in zip(ps, qs)
    )
    measured_dist = operator_norm(v - np.eye(d))
    report = {
        "n": n,
        "k": k,
        "d": d,
        "seed": seed,
        "checks": [
            {"name": "v*v = 1", "bound": 1e-8, "strict": False, "measured": measured_identity},
            {"name": "v*pv = q", "bound": 1e-8, "strict": False, "measured": measured_conj},
            {"name": "||v - 1||", "bound": 2.0**-k, "strict": True, "measured": measured_dist},
        ],
    }
    for c in report["checks"]:
        c["pass"] = c["measured"] < c["bound"] if c["strict"] else c["measured"] <= c["bound"]
    report["pass"] = all(c["pass"] for c in report["checks"])
    return report


def glimm_demo(sizes: Sequence[int], k: int, seed: int) -> dict:
    """One seeded near-inclusion conjugation instance with its norm-chain bound."""
    algebra = FinDimAlgebra(tuple(sizes))
    g = canonical_matrix_units(algebra)
    d = g.dim
    n = sum(m * m for m in algebra.summands)
    total_blocks = sum(algebra.summands)
    k0 = (n * 2 ** (k + 1) - 1).bit_length()
    threshold = min(2.0**-k0, 2.0 ** -Delta2(total_blocks, k0))
    rng = np.random.default_rng(seed)
    u_small = nearby_unitary(d, threshold / 4, rng)
    h = conjugate_system(g, u_small)
    ps = [g.unit(s, i, i) for s, m in enumerate(g.sizes) for i in range(m)]
    qs = [h.unit(s, i, i) for s, m in enumerate(h.sizes) for i in range(m)]
    v = exchange_unitary(ps, qs, k0)
    u = glimm_unitary(g, h, v)
    measured_identity = operator_norm(u.conj().T @ u - np.eye(d))
    measured_conj = max(
        operator_norm(u.conj().T @ g.unit(s, i, j) @ u - h.unit(s, i, j))
        for s, m in enumerate(g.sizes)
        for i in range(m)
        for j in range(m)
    )
    measured_dist = operator_norm(u - np.eye(d))
    report = {
        "sizes": list(algebra.summands),
        "k": k,
        "k0": k0,
        "seed": seed,
        "checks": [
            {"name": "u*u = 1", "bound": 1e-7, "strict": False, "measured": measured_identity},
            {"name": "u*gu = h", "bound": 1e-7, "strict": False, "measured": measured_conj},
            {
                "name": "||u - 1||",
                "bound": n * 2.0 ** (-k0 + 1),
                "strict": True,
                "measured": measured_dist,
            },
        ],
    }
    for c in report["checks"]:
        c["pass"] = c["measured"] < c["bound"] if c["strict"] else c["measured"] <= c["bound"]
    report["pass"] = all(c["pass"] for c in report["checks"])
    return report
