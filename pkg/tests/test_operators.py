import numpy as np
import pytest
from numpy.testing import assert_allclose

from probrep import (
    born_probabilities,
    make_ket,
    make_povm,
    make_prob_vector,
    random_density,
    random_povm,
    random_pure_state,
    tensor,
    validate_density,
)
from probrep.errors import (
    BadRank,
    DimensionMismatch,
    DimensionOverflow,
    NotHermitian,
    NotPositive,
    SumNotIdentity,
    TraceNotOne,
)
from probrep.operators import DIM_CAP, basis_ket, projector_povm


class TestValidateDensity:
    def test_maximally_mixed(self):
        rho = validate_density(np.eye(2) / 2)
        assert rho.dim == 2
        assert_allclose(rho.matrix, np.eye(2) / 2)

    def test_pure_projector(self):
        rho = validate_density(np.diag([1.0, 0.0]))
        assert_allclose(rho.matrix, np.diag([1.0, 0.0]))
        assert rho.purity() == pytest.approx(1.0)

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NotPositive) as exc:
            validate_density(np.diag([1.5, -0.5]))
        assert exc.value.min_eigenvalue == pytest.approx(-0.5)

    def test_not_hermitian(self):
        m = np.array([[0.5, 0.3], [0.0, 0.5]])
        with pytest.raises(NotHermitian):
            validate_density(m)

    def test_trace_not_one(self):
        with pytest.raises(TraceNotOne):
            validate_density(np.eye(2))

    def test_small_negative_eigenvalue_clipped(self):
        eps = 5e-11
        m = np.diag([1.0 + eps, -eps])
        rho = validate_density(m)
        w = np.linalg.eigvalsh(rho.matrix)
        assert w.min() >= 0.0
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-14)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            validate_density(np.ones((2, 3)))


class TestTensor:
    def test_identity_product(self):
        assert_allclose(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_index_convention(self):
        p0 = np.diag([1.0, 0.0])
        p1 = np.diag([0.0, 1.0])
        # (i_A, i_B) -> i_A * dim_B + i_B puts |0>|1> at flat index 1
        assert_allclose(tensor(p0, p1), np.diag([0.0, 1.0, 0.0, 0.0]))

    def test_mixed_product_property(self):
        # oracle: direct matrix multiplication on both sides
        rng = np.random.default_rng(7)
        for _ in range(20):
            a, b, c, d = (
                rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                for _ in range(4)
            )
            lhs = tensor(a, b) @ tensor(c, d)
            rhs = tensor(a @ c, b @ d)
            assert_allclose(lhs, rhs, atol=1e-12)

    def test_associative(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            a, b, c = (
                rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                for _ in range(3)
            )
            assert_allclose(
                tensor(tensor(a, b), c), tensor(a, tensor(b, c)), atol=1e-12
            )

    def test_overflow(self):
        with pytest.raises(DimensionOverflow):
            tensor(np.eye(4), np.eye(4))


class TestBornProbabilities:
    def test_x_eigenstate_in_z_basis(self):
        plus = make_ket(np.array([1.0, 1.0]) / np.sqrt(2))
        z = projector_povm(np.eye(2))
        q = born_probabilities(plus.density(), z)
        assert_allclose(q.values, [0.5, 0.5], atol=1e-15)

    def test_maximally_mixed(self):
        rho = validate_density(np.eye(3) / 3)
        povm = random_povm(3, 4, seed=0)
        q = born_probabilities(rho, povm)
        expected = [np.trace(el).real / 3 for el in povm.elements]
        assert_allclose(q.values, expected, atol=1e-12)

    def test_eigenstate_certainty(self):
        rho = basis_ket(2, 0).density()
        q = born_probabilities(rho, projector_povm(np.eye(2)))
        assert_allclose(q.values, [1.0, 0.0], atol=1e-15)

    def test_dimension_mismatch(self):
        rho = validate_density(np.eye(2) / 2)
        povm = random_povm(3, 3, seed=1)
        with pytest.raises(DimensionMismatch):
            born_probabilities(rho, povm)

    def test_completeness_sweep(self):
        # sum_j tr(rho F_j) = 1 within 1e-10 and each term >= -1e-12
        for seed in range(30):
            d = 2 + seed % 4
            rho = random_density(d, 1 + seed % d, seed)
            povm = random_povm(d, 2 + seed % 3, seed + 1000)
            q = born_probabilities(rho, povm)
            assert abs(q.values.sum() - 1.0) < 1e-10
            assert q.values.min() >= 0.0


class TestRandomPureState:
    def test_deterministic(self):
        a = random_pure_state(2, seed=1)
        b = random_pure_state(2, seed=1)
        assert_allclose(a.amplitudes, b.amplitudes, atol=0)

    def test_unit_norm(self):
        for seed in range(100):
            psi = random_pure_state(3, seed)
            assert abs(np.linalg.norm(psi.amplitudes) - 1.0) < 1e-12

    def test_invariant_measure_moment(self):
        # oracle: E[<psi|P|psi>] = tr(P)/d = 1/2; for d=2 the overlap is
        # uniform on [0,1], so Var = 1/12
        n = 10_000
        proj = np.diag([1.0, 0.0])
        vals = np.empty(n)
        for seed in range(n):
            psi = random_pure_state(2, seed).amplitudes
            vals[seed] = np.real(psi.conj() @ proj @ psi)
        sigma = np.sqrt(1.0 / 12.0 / n)
        assert abs(vals.mean() - 0.5) < 5 * sigma


class TestRandomDensity:
    def test_rank1_is_pure(self):
        for seed in range(20):
            rho = random_density(3, 1, seed)
            assert abs(rho.purity() - 1.0) < 1e-10

    def test_full_rank_valid(self):
        rho = random_density(2, 2, seed=5)
        validate_density(rho.matrix)

    def test_bad_rank(self):
        with pytest.raises(BadRank):
            random_density(2, 0, seed=0)
        with pytest.raises(BadRank):
            random_density(2, 3, seed=0)

    def test_mean_is_maximally_mixed(self):
        # symmetry of the construction: E[rho] = I/d; 5 sigma on the
        # componentwise sample standard error
        n = 10_000
        d = 2
        samples = np.empty((n, d, d), dtype=complex)
        for seed in range(n):
            samples[seed] = random_density(d, d, seed).matrix
        mean = samples.mean(axis=0)
        err = np.abs(mean - np.eye(d) / d)
        se_re = samples.real.std(axis=0) / np.sqrt(n)
        se_im = samples.imag.std(axis=0) / np.sqrt(n)
        bound = 5 * np.hypot(se_re, se_im) + 1e-12
        assert np.all(err <= bound)

    def test_validate_never_errors_across_seeds(self):
        for d in range(2, DIM_CAP + 1):
            for rank in range(1, d + 1):
                for seed in range(1000):
                    validate_density(random_density(d, rank, seed).matrix)


class TestRandomPovm:
    def test_output_passes_invariants(self):
        for seed in range(10):
            povm = random_povm(3, 4, seed)
            make_povm(povm.elements)  # revalidates all invariants

    def test_single_outcome_rejected(self):
        with pytest.raises(ValueError):
            random_povm(2, 1, seed=0)

    def test_completeness_on_mixed_state(self):
        rho = validate_density(np.eye(4) / 4)
        q = born_probabilities(rho, random_povm(4, 5, seed=3))
        assert abs(q.values.sum() - 1.0) < 1e-10

    def test_deterministic(self):
        a = random_povm(2, 3, seed=9)
        b = random_povm(2, 3, seed=9)
        assert_allclose(a.elements, b.elements, atol=0)


class TestProbVector:
    def test_tiny_negative_clipped(self):
        p = make_prob_vector([1.0 + 1e-13, -1e-13])
        assert p.values[1] == 0.0

    def test_too_negative_rejected(self):
        with pytest.raises(ValueError):
            make_prob_vector([1.0, -1e-11])

    def test_bad_sum_rejected(self):
        with pytest.raises(ValueError):
            make_prob_vector([0.6, 0.6])


class TestMakePovm:
    def test_sum_not_identity(self):
        els = np.array([np.eye(2) / 2, np.eye(2) / 3])
        with pytest.raises(SumNotIdentity):
            make_povm(els)

    def test_element_not_positive(self):
        els = np.array([np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])])
        with pytest.raises(NotPositive):
            make_povm(els)
