import itertools
from fractions import Fraction

import numpy as np
import pytest

from afkit.findim import AlgebraHom, FinDimAlgebra
from afkit.ordgrp import PosMatrix
from afkit.perturb import (
    Delta1,
    Delta2,
    Delta3,
    Delta4,
    DeltaGlimm,
    MultiplicityMismatch,
    PerturbationPreconditionError,
    canonical_matrix_units,
    conjugate_system,
    defect,
    delta0,
    delta1,
    delta2,
    embedded_matrix_units,
    exchange_block_operator,
    exchange_demo,
    exchange_unitary,
    glimm_demo,
    glimm_unitary,
    haar_unitary,
    nearby_unitary,
    operator_norm,
    square_partitions,
    unitary_intertwiner,
)

# -- independent re-derivations of the displayed recursions ------------------


def oracle_delta0(eps: Fraction, n: int) -> Fraction:
    if n == 1:
        return min(eps / 2, Fraction(1, 2))
    return min(
        Fraction(1, 4) * eps * Fraction(1, n),
        oracle_delta0(Fraction(1, 12) * eps * Fraction(1, n * n), n - 1),
        Fraction(1),
    )


def oracle_delta1(eps: Fraction, n: int) -> Fraction:
    if n == 1:
        return Fraction(1, 2)
    m = n - 1
    return min(Fraction(1, 3), eps * Fraction(1, 48 * m), oracle_delta1(eps * Fraction(1, 48 * m), m))


def oracle_delta2(eps: Fraction, n: int) -> Fraction:
    return min(Fraction(1, 5), eps * (8 - 5 * eps), oracle_delta1(eps, n))


class TestModuli:
    def test_delta0_base(self):
        assert delta0(Fraction(1, 2), 1) == Fraction(1, 4)

    def test_delta0_step(self):
        assert delta0(Fraction(1, 2), 2) == Fraction(1, 192)

    def test_delta1_base_ignores_eps(self):
        for eps in (Fraction(1, 2), Fraction(1, 7), Fraction(9, 10)):
            assert delta1(eps, 1) == Fraction(1, 2)

    def test_against_oracles(self):
        for eps in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(3, 5)):
            for n in range(1, 8):
                assert delta0(eps, n) == oracle_delta0(eps, n)
                assert delta1(eps, n) == oracle_delta1(eps, n)
                assert delta2(eps, n) == oracle_delta2(eps, n)

    def test_ranges_and_monotonicity(self):
        for eps in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
            for fn in (delta0, delta1, delta2):
                values = [fn(eps, n) for n in range(1, 11)]
                assert all(0 < v <= 1 for v in values)
                assert all(a >= b for a, b in zip(values, values[1:]))

    def test_domain_checked(self):
        with pytest.raises(ValueError):
            delta0(Fraction(3, 2), 1)
        with pytest.raises(ValueError):
            delta0(Fraction(1, 2), 0)
        with pytest.raises(ValueError):
            delta2(Fraction(0), 2)

    def test_Delta2_closed_form(self):
        assert Delta2(3, 4) == 9

    def test_Delta1_closed_form_rank_one(self):
        # delta0(2^-(k+1), 1) = 2^-(k+2), so the least winning exponent is k+3
        for k in range(0, 21):
            assert Delta1(1, k) == k + 3

    def test_Delta_terminate_because_deltas_are_positive(self):
        for n in range(1, 6):
            for k in range(0, 6):
                assert delta0(Fraction(1, 2 ** (k + 1)), n) > 0
                assert delta2(Fraction(1, 2 ** (k + 1)), n) > 0
                assert 2 ** -Delta1(n, k) < delta0(Fraction(1, 2 ** (k + 1)), n)
                assert 2 ** -Delta3(n, k) < delta2(Fraction(1, 2 ** (k + 1)), n)
                assert Delta1(n, k) >= 1 and Delta3(n, k) >= 1

    def test_Delta4_dominates_its_pieces(self):
        for n in range(1, 5):
            for k in range(0, 5):
                inner = max(Delta3(m, k) for m in range(n + 1))
                assert Delta4(n, k) >= 1 + inner
                assert Delta4(n, k) >= max(Delta1(m, inner + 2) for m in range(k + 1))

    def test_square_partitions(self):
        assert square_partitions(2) == ((1, 1),)
        assert square_partitions(4) == ((1, 1, 1, 1), (2,))
        assert set(square_partitions(9)) == {(1,) * 9, (1, 1, 1, 1, 1, 2), (1, 2, 2), (3,)}
        for parts in square_partitions(13):
            assert sum(p * p for p in parts) == 13

    def test_DeltaGlimm_uses_worst_partition(self):
        n, k = 4, 3
        k0 = (n * 2 ** (k + 1) - 1).bit_length()
        expected = max(Delta4(n, Delta2(sum(p), k0)) for p in square_partitions(n))
        assert DeltaGlimm(n, k) == expected


class TestOperatorNorm:
    def test_zero(self):
        assert operator_norm(np.zeros((3, 3))) == 0.0

    def test_unitary(self):
        rng = np.random.default_rng(1)
        u = haar_unitary(5, rng)
        assert abs(operator_norm(u) - 1.0) <= 1e-10

    def test_diagonal(self):
        assert abs(operator_norm(np.diag([3, -4j])) - 4.0) <= 1e-10


class TestMatrixUnits:
    def test_single_block(self):
        sys1 = canonical_matrix_units(FinDimAlgebra((1,)))
        assert sys1.dim == 1 and defect(sys1) == 0.0

    def test_two_by_two_block(self):
        sys2 = canonical_matrix_units(FinDimAlgebra((2,)))
        assert sys2.dim == 2
        assert defect(sys2) <= 1e-12
        e01 = sys2.unit(0, 0, 1)
        assert e01[0, 1] == 1 and np.count_nonzero(e01) == 1

    def test_cross_block_products_vanish(self):
        sys12 = canonical_matrix_units(FinDimAlgebra((1, 2)))
        assert sys12.dim == 3
        z = sys12.unit(0, 0, 0) @ sys12.unit(1, 0, 1)
        assert operator_norm(z) == 0.0
        assert defect(sys12) <= 1e-12

    def test_defect_small_for_all_small_algebras(self):
        families = [
            FinDimAlgebra(sizes)
            for count in (1, 2, 3)
            for sizes in itertools.combinations_with_replacement(range(1, 5), count)
        ] + [FinDimAlgebra((8,)), FinDimAlgebra((4, 4)), FinDimAlgebra((1, 2, 3, 4))]
        for f in families:
            if sum(n * n for n in f.summands) <= 64:
                assert defect(canonical_matrix_units(f)) <= 1e-12

    def test_perturbed_entry_measured(self):
        eta = 1e-4
        sys2 = canonical_matrix_units(FinDimAlgebra((2,)))
        units = [[[np.array(sys2.unit(0, i, j)) for j in range(2)] for i in range(2)]]
        units[0][0][1] = units[0][0][1] + eta * np.eye(2)
        from afkit.perturb import MatrixUnitSystem

        bumped = MatrixUnitSystem((2,), (tuple(tuple(r) for r in units[0]),), unital=True)
        d = defect(bumped)
        assert eta / 2 <= d <= 3 * eta

    def test_empty_type(self):
        from afkit.perturb import MatrixUnitSystem

        assert defect(MatrixUnitSystem((), (), unital=False)) == 0.0


class TestExchange:
    def test_equal_projections_give_identity(self):
        d = 4
        p1 = np.zeros((d, d), dtype=complex)
        p1[:2, :2] = np.eye(2)
        p2 = np.eye(d) - p1
        v = exchange_unitary([p1, p2], [p1, p2], k=4)
        assert operator_norm(v - np.eye(d)) <= 1e-12

    def test_seeded_instances(self):
        for seed in range(5):
            report = exchange_demo(2, 4, 6, seed=seed)
            assert report["pass"], report

    def test_threshold_violation_reported(self):
        d = 4
        p1 = np.zeros((d, d), dtype=complex)
        p1[:2, :2] = np.eye(2)
        p2 = np.eye(d) - p1
        rng = np.random.default_rng(9)
        u = nearby_unitary(d, 0.4, rng)
        qs = [u @ p @ u.conj().T for p in (p1, p2)]
        if max(operator_norm(p - q) for p, q in zip((p1, p2), qs)) >= 2.0 ** -Delta2(2, 4):
            with pytest.raises(PerturbationPreconditionError) as err:
                exchange_unitary([p1, p2], qs, k=4)
            assert "Delta2" in str(err.value)

    def test_non_projection_rejected(self):
        d = 2
        bad = 0.5 * np.eye(d)
        with pytest.raises(PerturbationPreconditionError):
            exchange_unitary([bad], [bad], k=2)

    def test_partition_sum_required(self):
        d = 4
        p1 = np.zeros((d, d), dtype=complex)
        p1[0, 0] = 1
        with pytest.raises(PerturbationPreconditionError):
            exchange_unitary([p1], [p1], k=2)


class TestSignRegression:
    def test_minus_variant_fails_unitarity_at_equal_projections(self):
        # p = q, p not 0 or 1: the minus formula degenerates to 1 - 4p
        d = 4
        p = np.zeros((d, d), dtype=complex)
        p[:2, :2] = np.eye(2)
        u_minus = exchange_block_operator(p, p, sign=-1)
        assert operator_norm(u_minus.conj().T @ u_minus - np.eye(d)) > 0.5

    def test_plus_variant_is_identity_there(self):
        d = 4
        p = np.zeros((d, d), dtype=complex)
        p[:2, :2] = np.eye(2)
        u_plus = exchange_block_operator(p, p, sign=1)
        assert operator_norm(u_plus - np.eye(d)) <= 1e-12

    def test_plus_variant_intertwines(self):
        rng = np.random.default_rng(12)
        d = 6
        p = np.zeros((d, d), dtype=complex)
        p[:3, :3] = np.eye(3)
        u = nearby_unitary(d, 0.05, rng)
        q = u @ p @ u.conj().T
        z = exchange_block_operator(p, q, sign=1)
        assert operator_norm(z @ p - q @ z) <= 1e-12


class TestGlimm:
    def test_identity_case(self):
        g = canonical_matrix_units(FinDimAlgebra((2,)))
        u = glimm_unitary(g, g, np.eye(2))
        assert operator_norm(u - np.eye(2)) <= 1e-12

    def test_type_mismatch(self):
        g = canonical_matrix_units(FinDimAlgebra((2,)))
        h = canonical_matrix_units(FinDimAlgebra((1, 1)))
        with pytest.raises(ValueError):
            glimm_unitary(g, h, np.eye(2))

    def test_bad_v_rejected(self):
        g = canonical_matrix_units(FinDimAlgebra((2,)))
        rng = np.random.default_rng(3)
        h = conjugate_system(g, haar_unitary(2, rng))
        with pytest.raises(PerturbationPreconditionError):
            glimm_unitary(g, h, np.eye(2))

    def test_seeded_conjugation(self):
        for seed in range(4):
            report = glimm_demo((2,), 4, seed=seed)
            assert report["pass"], report
            report = glimm_demo((1, 2), 4, seed=seed)
            assert report["pass"], report


class TestUnitaryIntertwiner:
    def _realization(self, mult: int = 2):
        hom = AlgebraHom(FinDimAlgebra((2,)), FinDimAlgebra((4,)), PosMatrix(((mult,),)))
        return embedded_matrix_units(hom)

    def test_identical_realizations(self):
        r = self._realization()
        u = unitary_intertwiner(r, r)
        assert operator_norm(u.conj().T @ u - np.eye(4)) <= 1e-8
        for s, n in enumerate(r.sizes):
            for i in range(n):
                for j in range(n):
                    assert (
                        operator_norm(u @ r.unit(s, i, j) @ u.conj().T - r.unit(s, i, j)) <= 1e-8
                    )

    def test_conjugated_realization(self):
        r1 = self._realization()
        rng = np.random.default_rng(17)
        w = haar_unitary(4, rng)
        r2 = conjugate_system(r1, w)
        u = unitary_intertwiner(r1, r2)
        assert operator_norm(u.conj().T @ u - np.eye(4)) <= 1e-8
        worst = max(
            operator_norm(u @ r1.unit(s, i, j) @ u.conj().T - r2.unit(s, i, j))
            for s, n in enumerate(r1.sizes)
            for i in range(n)
            for j in range(n)
        )
        assert worst <= 1e-8

    def test_multiplicity_mismatch(self):
        r1 = self._realization(mult=2)
        corner_hom = AlgebraHom(FinDimAlgebra((2,)), FinDimAlgebra((4,)), PosMatrix(((1,),)))
        r2 = embedded_matrix_units(corner_hom)
        with pytest.raises(MultiplicityMismatch):
            unitary_intertwiner(r1, r2)

    def test_multi_block_conjugation(self):
        hom = AlgebraHom(
            FinDimAlgebra((1, 2)), FinDimAlgebra((2, 3)), PosMatrix(((2, 0), (1, 1)))
        )
        r1 = embedded_matrix_units(hom)
        rng = np.random.default_rng(23)
        w = haar_unitary(5, rng)
        r2 = conjugate_system(r1, w)
        u = unitary_intertwiner(r1, r2)
        worst = max(
            operator_norm(u @ r1.unit(s, i, j) @ u.conj().T - r2.unit(s, i, j))
            for s, n in enumerate(r1.sizes)
            for i in range(n)
            for j in range(n)
        )
        assert worst <= 1e-8

    def test_corrects_realizations_of_an_intertwining_round(self):
        # the K0-level round beta.alpha = bond lifts to algebra homs whose
        # numeric realizations differ only by a unitary, recovered here
        from afkit.dimgroup import certificate_of_af, af_of_certificate
        from afkit.elliott import build_zigzag
        from afkit.findim import car_sequence, compose_hom, hom_from_matrix
        from helpers import uhf_certificate

        car = certificate_of_af(car_sequence(10))
        car4 = uhf_certificate(4, 5)
        zz = build_zigzag(car, car4, depth=3)
        seqA = af_of_certificate(car)
        seqB = af_of_certificate(car4)
        s = 1
        sigma = hom_from_matrix(
            seqA.algebras[zz.n_stages[s]], seqB.algebras[zz.m_stages[s]], zz.alphas[s]
        )
        tau = hom_from_matrix(
            seqB.algebras[zz.m_stages[s]], seqA.algebras[zz.n_stages[s + 1]], zz.betas[s]
        )
        round_hom = compose_hom(tau, sigma)
        r1 = embedded_matrix_units(round_hom)
        rng = np.random.default_rng(29)
        r2 = conjugate_system(r1, haar_unitary(r1.dim, rng))
        u = unitary_intertwiner(r1, r2)
        worst = max(
            operator_norm(u @ r1.unit(b, i, j) @ u.conj().T - r2.unit(b, i, j))
            for b, n in enumerate(r1.sizes)
            for i in range(n)
            for j in range(n)
        )
        assert worst <= 1e-8
