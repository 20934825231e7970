import numpy as np
import pytest

from cvsteer import (
    GaussianState,
    Partition,
    beam_splitter,
    full_report,
    partial_transpose,
    ppt_min,
    ppt_two_mode,
    squeezed_mode,
    steerability,
    symplectic_eigenvalues,
    tensor,
    vacuum,
)
from cvsteer.protocol import build_network_state
from conftest import (
    FOUR_MODE_LABELS,
    FOUR_MODE_PPT,
    FOUR_MODE_REFERENCE,
    THREE_MODE_LABELS,
    THREE_MODE_PPT,
    THREE_MODE_REFERENCE,
    random_physical_cov,
    three_user_params,
    two_user_params,
)


def _sym(m):
    return (m + m.T) / 2


class TestSymplecticEigenvalues:
    def test_identity(self):
        np.testing.assert_allclose(symplectic_eigenvalues(np.eye(6)), np.ones(3))

    def test_single_mode_sqrt_det(self):
        nus = symplectic_eigenvalues(np.diag([0.5, 3.55]))
        np.testing.assert_allclose(nus, [np.sqrt(0.5 * 3.55)], atol=1e-12)
        assert nus[0] == pytest.approx(1.332, abs=1e-3)

    def test_invariant_under_beam_splitter(self):
        state = tensor(
            squeezed_mode(0.5, 3.55, "x_squeezed", label="a"),
            squeezed_mode(0.7, 1.9, "p_squeezed", label="b"),
        )
        before = symplectic_eigenvalues(state.cov)
        after = symplectic_eigenvalues(beam_splitter(state, 0, 1, 0.37).cov)
        np.testing.assert_allclose(after, before, atol=1e-10)

    def test_sorted_ascending(self, rng):
        for _ in range(20):
            nus = symplectic_eigenvalues(random_physical_cov(rng, 3))
            assert np.all(np.diff(nus) >= 0)
            assert np.all(nus >= 1.0 - 1e-9)

    def test_not_positive_definite_rejected(self):
        with pytest.raises(ValueError, match="positive definite"):
            symplectic_eigenvalues(np.diag([1.0, -1.0]))

    def test_not_symmetric_rejected(self):
        bad = np.eye(4)
        bad[0, 1] = 0.5
        with pytest.raises(ValueError, match="symmetric"):
            symplectic_eigenvalues(bad)

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError):
            symplectic_eigenvalues(np.eye(3))


class TestPartialTranspose:
    def test_involution(self, rng):
        cov = random_physical_cov(rng, 3)
        np.testing.assert_array_equal(
            partial_transpose(partial_transpose(cov, [1]), [1]), cov
        )

    def test_product_state_spectrum_unchanged(self):
        state = tensor(
            squeezed_mode(0.5, 3.55, "x_squeezed", label="a"),
            squeezed_mode(0.7, 1.9, "p_squeezed", label="b"),
        )
        before = symplectic_eigenvalues(state.cov)
        after = symplectic_eigenvalues(partial_transpose(state.cov, [0]))
        np.testing.assert_allclose(np.sort(after), np.sort(before), atol=1e-10)

    def test_reference_ancilla_value(self):
        pt = partial_transpose(THREE_MODE_REFERENCE, [2])
        assert symplectic_eigenvalues(pt).min() == pytest.approx(1.264, abs=0.01)

    def test_invalid_mode(self):
        with pytest.raises(IndexError):
            partial_transpose(np.eye(4), [3])


class TestPptMin:
    @pytest.mark.parametrize("mode,expected", list(zip(THREE_MODE_LABELS, THREE_MODE_PPT)))
    def test_three_mode_reference(self, mode, expected):
        state = GaussianState(THREE_MODE_LABELS, THREE_MODE_REFERENCE)
        assert ppt_min(state, [mode]) == pytest.approx(expected, abs=0.01)

    @pytest.mark.parametrize("mode,expected", list(zip(FOUR_MODE_LABELS, FOUR_MODE_PPT)))
    def test_four_mode_reference(self, mode, expected):
        state = GaussianState(FOUR_MODE_LABELS, _sym(FOUR_MODE_REFERENCE))
        assert ppt_min(state, [mode]) == pytest.approx(expected, abs=0.01)

    def test_product_states_separable(self, rng):
        for _ in range(10):
            state = GaussianState(
                ("a", "b"),
                np.block([
                    [random_physical_cov(rng, 1), np.zeros((2, 2))],
                    [np.zeros((2, 2)), random_physical_cov(rng, 1)],
                ]),
            )
            assert ppt_min(state, ["a"]) >= 1.0 - 1e-9

    def test_party_validation(self):
        state = vacuum(2)
        with pytest.raises(ValueError):
            ppt_min(state, [])
        with pytest.raises(ValueError):
            ppt_min(state, [0, 1])


class TestPptTwoMode:
    def test_vacuum(self):
        assert ppt_two_mode(np.eye(4)) == pytest.approx(1.0, abs=1e-12)

    def test_two_user_output(self):
        params = two_user_params(v_s=0.50, v_a=3.55).replace(f_b=1.239)
        state = build_network_state(params, "final_two_user")
        value = ppt_two_mode(state.cov)
        assert value == pytest.approx(0.682, abs=1e-3)
        assert abs(value - ppt_min(state, ["A"])) < 1e-9

    def test_matches_eigensolver_on_random_states(self, rng):
        worst = 0.0
        for _ in range(1000):
            cov = random_physical_cov(rng, 2, scale=rng.uniform(0.2, 1.5))
            worst = max(worst, abs(ppt_two_mode(cov) - symplectic_eigenvalues(
                partial_transpose(cov, [0])).min()))
        assert worst < 1e-9

    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            ppt_two_mode(np.eye(6))


class TestSteerability:
    def test_product_state_no_steering(self, rng):
        cov = np.block([
            [random_physical_cov(rng, 1), np.zeros((2, 2))],
            [np.zeros((2, 2)), random_physical_cov(rng, 1)],
        ])
        state = GaussianState(("a", "b"), cov)
        part = Partition((0,), (1,))
        assert steerability(state, part) == 0.0
        assert steerability(state, part.swapped()) == 0.0

    def test_two_user_forward_value(self):
        state = build_network_state(two_user_params(v_s=0.50, v_a=3.55), "final_two_user")
        g = steerability(state, Partition((0,), (1,)))
        assert abs(g - np.log(8.10 / 7.60)) < 1e-9

    def test_two_user_one_way(self):
        state = build_network_state(two_user_params(v_s=0.50, v_a=3.55), "final_two_user")
        assert steerability(state, Partition((1,), (0,))) == 0.0
        # the reverse-direction conditional state sits well above vacuum noise
        n = state.cov[2:, 2:]
        m = state.cov[:2, :2]
        gam = state.cov[2:, :2]
        schur = m - gam.T @ np.linalg.solve(n, gam)
        assert schur[0, 0] == pytest.approx(1.51, abs=0.01)

    def test_partition_validation(self):
        with pytest.raises(ValueError):
            Partition((), (1,))
        with pytest.raises(ValueError):
            Partition((0,), (0,))

    def test_singular_steering_block_rejected(self):
        cov = np.diag([1e7, 1e-7, 1.0, 1.0])
        state = GaussianState(("a", "b"), cov)
        with pytest.raises(ValueError, match="singular"):
            steerability(state, Partition((0,), (1,)))

    def test_local_symplectic_invariance(self, rng):
        state = build_network_state(three_user_params(0.85), "final_three_user")
        part = Partition((0,), (1, 2))
        before = steerability(state, part)
        for t in rng.uniform(0.05, 0.95, size=5):
            mixed = beam_splitter(state, 1, 2, float(t))
            assert abs(steerability(mixed, part) - before) < 1e-9

    def test_steering_implies_ppt_entanglement(self):
        for eta in np.linspace(0.1, 1.0, 10):
            state = build_network_state(two_user_params(float(eta)), "final_two_user")
            if steerability(state, Partition((0,), (1,))) > 0:
                assert ppt_min(state, ["A"]) < 1.0

    def test_nonnegative_certificates_on_random_states(self, rng):
        # any physical state: positive PPT spectrum, nonnegative steering
        for _ in range(50):
            n = int(rng.integers(2, 5))
            state = GaussianState(tuple(f"m{k}" for k in range(n)),
                                  random_physical_cov(rng, n))
            cut = int(rng.integers(1, n))
            part = Partition(tuple(range(cut)), tuple(range(cut, n)))
            assert ppt_min(state, part.steering) > 0
            assert steerability(state, part) >= 0
            assert steerability(state, part.swapped()) >= 0

    def test_monogamy_over_loss_grid(self):
        # two independent parties can never steer the same target: whenever
        # Alice steers David, Bob cannot
        for eta in np.linspace(0.02, 1.0, 50):
            state = build_network_state(three_user_params(float(eta)), "final_three_user")
            if steerability(state, Partition((0,), (2,))) > 1e-6:
                assert steerability(state, Partition((1,), (2,))) == 0.0


class TestFullReport:
    def test_three_user_hierarchy(self):
        state = build_network_state(three_user_params(1.0), "final_three_user")
        report = full_report(state, [
            Partition((0,), (1, 2)),
            Partition((0,), (1,)),
            Partition((0,), (2,)),
            Partition((1,), (2,)),
        ])
        g = report.steer_by_direction
        assert g["A->B,D"] > g["A->B"] > 0
        assert g["A->B,D"] > g["A->D"] > 0
        assert g["B->D"] == 0.0

    def test_vacuum_all_separable(self):
        report = full_report(vacuum(3, ["a", "b", "c"]), [
            Partition((0,), (1, 2)),
            Partition((1,), (0, 2)),
            Partition((2,), (0, 1)),
        ])
        assert all(v == "separable" for v in report.verdicts.values())
        assert all(v == 0.0 for v in report.steer_by_direction.values())
        assert all(v == pytest.approx(1.0, abs=1e-9) for v in report.ppt_by_split.values())

    def test_split_keys_use_labels(self):
        state = build_network_state(two_user_params(1.0), "final_two_user")
        report = full_report(state, [Partition((0,), (1,))])
        assert set(report.ppt_by_split) == {"A|B"}
        assert set(report.steer_by_direction) == {"A->B", "B->A"}
