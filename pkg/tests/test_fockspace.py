import numpy as np
import pytest

from blockade_sim.fockspace import (
    DensityMatrix,
    HilbertSpace,
    InvalidArgumentError,
    InvalidDimensionError,
    Operator,
    StateVector,
    annihilation,
    basis_state,
    devectorize,
    embed,
    expectation,
    identity,
    number,
    partial_trace,
    partial_transpose,
    pauli,
    spost,
    spre,
    vectorize,
)


def random_operator(rng, space, hermitian=False):
    d = space.total_dim
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    if hermitian:
        m = (m + m.conj().T) / 2
    return Operator(space, m)


def random_density_matrix(rng, space):
    d = space.total_dim
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m @ m.conj().T
    return DensityMatrix(Operator(space, rho / np.trace(rho)))


class TestHilbertSpace:
    def test_total_dim(self):
        assert HilbertSpace((2, 3, 3)).total_dim == 18

    def test_rejects_small_dims(self):
        with pytest.raises(InvalidDimensionError):
            HilbertSpace((2, 1))
        with pytest.raises(InvalidDimensionError):
            HilbertSpace(())

    def test_index_roundtrip(self):
        space = HilbertSpace((2, 3, 4))
        for idx in range(space.total_dim):
            assert space.index(space.occupations(idx)) == idx


class TestAnnihilation:
    def test_matrix_elements_cutoff_3(self):
        a = annihilation(3).matrix
        expected = np.zeros((3, 3))
        expected[0, 1] = 1.0
        expected[1, 2] = np.sqrt(2)
        assert np.allclose(a, expected)

    def test_number_eigenvalue(self):
        n_op = number(4)
        ket2 = basis_state(HilbertSpace((4,)), (2,)).amplitudes
        assert np.allclose(n_op.matrix @ ket2, 2 * ket2)

    @pytest.mark.parametrize("cutoff", [2, 4, 9])
    def test_commutator_below_truncation_edge(self, cutoff):
        a = annihilation(cutoff).matrix
        comm = a @ a.conj().T - a.conj().T @ a
        # canonical commutator holds exactly on the first cutoff-1 levels
        assert np.allclose(comm[: cutoff - 1, : cutoff - 1], np.eye(cutoff - 1))

    @pytest.mark.parametrize("cutoff", [3, 6])
    def test_number_exact_on_all_levels(self, cutoff):
        n_op = number(cutoff).matrix
        assert np.allclose(np.diag(n_op), np.arange(cutoff))

    def test_rejects_cutoff_below_2(self):
        with pytest.raises(InvalidDimensionError):
            annihilation(1)


class TestPauli:
    def test_projector_on_excited(self):
        proj = (pauli("plus") @ pauli("minus")).matrix
        assert np.allclose(proj, np.diag([1, 0]))

    def test_sigma_x_squared(self):
        assert np.allclose((pauli("x") @ pauli("x")).matrix, np.eye(2))

    def test_sigma_z_eigenvalues(self):
        assert np.allclose(np.linalg.eigvalsh(pauli("z").matrix), [-1, 1])

    def test_sigma_z_sign_convention(self):
        # |e> is index 0 and carries +1
        assert pauli("z").matrix[0, 0] == 1

    def test_unknown_label(self):
        with pytest.raises(InvalidArgumentError):
            pauli("w")


class TestEmbed:
    def test_sigma_z_on_qubit_slot(self):
        space = HilbertSpace((2, 3, 3))
        sz = embed(pauli("z"), space, 0)
        ket = basis_state(space, (0, 1, 2)).amplitudes  # |e,1,2>
        assert np.allclose(sz.matrix @ ket, ket)

    def test_annihilation_on_mode_slot(self):
        space = HilbertSpace((2, 3, 3))
        a1 = embed(annihilation(3), space, 1)
        ket = basis_state(space, (1, 2, 0)).amplitudes  # |g,2,0>
        target = basis_state(space, (1, 1, 0)).amplitudes
        assert np.allclose(a1.matrix @ ket, np.sqrt(2) * target)

    def test_disjoint_embeds_commute(self):
        space = HilbertSpace((2, 3, 3))
        a = embed(annihilation(3), space, 1)
        bdag = embed(annihilation(3).dag(), space, 2)
        comm = a.matrix @ bdag.matrix - bdag.matrix @ a.matrix
        assert np.max(np.abs(comm)) == 0.0

    def test_embed_preserves_spectrum_with_multiplicity(self):
        space = HilbertSpace((2, 3, 2))
        op = Operator(HilbertSpace((3,)), np.diag([0.0, 1.5, -2.0]))
        ev = np.sort(np.linalg.eigvals(embed(op, space, 1).matrix).real)
        expected = np.sort(np.repeat([0.0, 1.5, -2.0], space.total_dim // 3))
        assert np.allclose(ev, expected)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            embed(annihilation(4), HilbertSpace((2, 3, 3)), 1)


class TestPartialTrace:
    def test_bell_state_reduction(self):
        space = HilbertSpace((3, 3))
        psi = (basis_state(space, (1, 0)).amplitudes + basis_state(space, (0, 1)).amplitudes) / np.sqrt(2)
        rho = StateVector(space, psi).to_density_matrix()
        reduced = partial_trace(rho, {0})
        assert np.allclose(reduced.matrix, np.diag([0.5, 0.5, 0.0]))

    def test_product_state(self):
        rng = np.random.default_rng(7)
        rho_a = random_density_matrix(rng, HilbertSpace((3,)))
        rho_b = random_density_matrix(rng, HilbertSpace((4,)))
        joint = DensityMatrix(Operator(HilbertSpace((3, 4)), np.kron(rho_a.matrix, rho_b.matrix)))
        assert np.allclose(partial_trace(joint, {0}).matrix, rho_a.matrix, atol=1e-12)
        assert np.allclose(partial_trace(joint, {1}).matrix, rho_b.matrix, atol=1e-12)

    def test_trace_and_positivity_preserved(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            rho = random_density_matrix(rng, HilbertSpace((2, 3, 3)))
            for keep in ({0}, {1}, {2}, {0, 1}, {1, 2}):
                reduced = partial_trace(rho, keep)
                assert abs(np.trace(reduced.matrix) - 1) < 1e-12
                assert np.linalg.eigvalsh(reduced.matrix).min() > -1e-10

    def test_empty_keep_rejected(self):
        rng = np.random.default_rng(0)
        rho = random_density_matrix(rng, HilbertSpace((2, 2)))
        with pytest.raises(InvalidArgumentError):
            partial_trace(rho, set())


class TestPartialTranspose:
    def test_bell_state_eigenvalues(self):
        space = HilbertSpace((2, 2))
        psi = (basis_state(space, (1, 0)).amplitudes + basis_state(space, (0, 1)).amplitudes) / np.sqrt(2)
        rho = StateVector(space, psi).to_density_matrix()
        ev = np.sort(np.linalg.eigvalsh(partial_transpose(rho, 0).matrix))
        assert np.allclose(ev, [-0.5, 0.5, 0.5, 0.5])

    def test_product_state_stays_positive(self):
        rng = np.random.default_rng(3)
        rho_a = random_density_matrix(rng, HilbertSpace((3,)))
        rho_b = random_density_matrix(rng, HilbertSpace((3,)))
        joint = DensityMatrix(Operator(HilbertSpace((3, 3)), np.kron(rho_a.matrix, rho_b.matrix)))
        assert np.linalg.eigvalsh(partial_transpose(joint, 0).matrix).min() > -1e-12

    def test_involution_and_trace(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            rho = random_density_matrix(rng, HilbertSpace((2, 3)))
            pt = partial_transpose(rho, 1)
            assert abs(np.trace(pt.matrix) - 1) < 1e-12
            pt2 = partial_transpose(DensityMatrix(Operator(rho.space, pt.matrix), tol_positivity=10.0), 1)
            assert np.allclose(pt2.matrix, rho.matrix)

    def test_invalid_index(self):
        rng = np.random.default_rng(0)
        rho = random_density_matrix(rng, HilbertSpace((2, 2)))
        with pytest.raises(InvalidArgumentError):
            partial_transpose(rho, 2)


class TestExpectation:
    def test_number_on_fock_state(self):
        space = HilbertSpace((4,))
        rho = basis_state(space, (2,)).to_density_matrix()
        assert expectation(rho, number(4)) == pytest.approx(2.0)

    def test_sigma_z_on_maximally_mixed(self):
        rho = DensityMatrix(Operator(HilbertSpace((2,)), np.eye(2) / 2))
        assert abs(expectation(rho, pauli("z"))) < 1e-14

    def test_identity(self):
        rng = np.random.default_rng(9)
        rho = random_density_matrix(rng, HilbertSpace((2, 3)))
        assert expectation(rho, identity(rho.space)) == pytest.approx(1.0)

    def test_hermitian_gives_real(self):
        rng = np.random.default_rng(13)
        space = HilbertSpace((2, 3))
        for _ in range(10):
            rho = random_density_matrix(rng, space)
            op = random_operator(rng, space, hermitian=True)
            assert abs(expectation(rho, op).imag) < 1e-10

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(0)
        rho = random_density_matrix(rng, HilbertSpace((2, 2)))
        with pytest.raises(InvalidDimensionError):
            expectation(rho, number(4))


class TestVectorization:
    def test_column_stacking_of_identity(self):
        vec = vectorize(np.eye(2))
        assert np.allclose(vec, [1, 0, 0, 1])

    def test_column_stacking_order(self):
        m = np.array([[1, 2], [3, 4]], dtype=complex)
        assert np.allclose(vectorize(m), [1, 3, 2, 4])

    def test_roundtrip_random_hermitian(self):
        rng = np.random.default_rng(17)
        space = HilbertSpace((2, 3))
        op = random_operator(rng, space, hermitian=True)
        assert np.allclose(devectorize(vectorize(op), space).matrix, op.matrix, atol=1e-14)

    def test_spre_spost_composition_law(self):
        # spre(A) spost(B) vec(rho) = vec(A rho B), 100 random pairs
        rng = np.random.default_rng(23)
        space = HilbertSpace((2, 3))
        for _ in range(100):
            a = random_operator(rng, space)
            b = random_operator(rng, space)
            rho = random_operator(rng, space)
            lhs = (spre(a) @ spost(b)) @ vectorize(rho)
            rhs = vectorize(a.matrix @ rho.matrix @ b.matrix)
            assert np.allclose(lhs, rhs, atol=1e-11)

    def test_spre_action(self):
        rng = np.random.default_rng(29)
        space = HilbertSpace((3,))
        a = random_operator(rng, space)
        rho = random_operator(rng, space)
        assert np.allclose(spre(a) @ vectorize(rho), vectorize(a.matrix @ rho.matrix))
        assert np.allclose(spost(a) @ vectorize(rho), vectorize(rho.matrix @ a.matrix))


class TestValidation:
    def test_density_matrix_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.1], [0.0, 0.5]])
        with pytest.raises(InvalidArgumentError):
            DensityMatrix(Operator(HilbertSpace((2,)), m))

    def test_density_matrix_rejects_wrong_trace(self):
        with pytest.raises(InvalidArgumentError):
            DensityMatrix(Operator(HilbertSpace((2,)), np.eye(2)))

    def test_density_matrix_rejects_negative(self):
        m = np.diag([1.5, -0.5])
        with pytest.raises(InvalidArgumentError):
            DensityMatrix(Operator(HilbertSpace((2,)), m))

    def test_state_vector_norm(self):
        with pytest.raises(InvalidArgumentError):
            StateVector(HilbertSpace((2,)), np.array([1.0, 1.0]))

    def test_operator_immutable(self):
        op = pauli("x")
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 5.0
