import numpy as np
import pytest

from cvsteer import ProtocolParams, optimal_fb, optimal_fd

# Published reference covariance matrices (homodyne reconstructions quoted to
# three decimals).  The three-mode state holds (A, B0, C1) right before Bob's
# beam splitter; the four-mode state holds (A, B, C2, D0) with the second
# ancilla in flight.  Note the four-mode matrix is asymmetric by 1e-3 exactly
# as published, which the file reader must tolerate.

THREE_MODE_REFERENCE = np.array([
    [2.754, 0, 1.296, 0, 0.764, 0],
    [0, 2.759, 0, -1.294, 0, -0.767],
    [1.296, 0, 3.282, 0, -1.296, 0],
    [0, -1.294, 0, 3.276, 0, -1.291],
    [0.764, 0, -1.296, 0, 2.768, 0],
    [0, -0.767, 0, -1.291, 0, 2.786],
])
THREE_MODE_LABELS = ("A", "B0", "C1")
THREE_MODE_PPT = (0.701, 1.182, 1.264)

FOUR_MODE_REFERENCE = np.array([
    [2.757, 0, 1.483, 0, 0.318, 0, 1.809, 0],
    [0, 2.753, 0, -1.462, 0, -0.312, 0, -1.817],
    [1.483, 0, 1.774, 0, 0.277, 0, 0.985, 0],
    [0, -1.462, 0, 1.777, 0, 0.297, 0, 1.061],
    [0.318, 0, 0.277, 0, 4.277, 0, 3.643, 0],
    [0, -0.312, 0, 0.297, 0, 4.251, 0, 3.573],
    [1.809, 0, 0.985, 0, 3.644, 0, 5.592, 0],
    [0, -1.817, 0, 1.061, 0, 3.573, 0, 5.606],
])
FOUR_MODE_LABELS = ("A", "B", "C2", "D0")
FOUR_MODE_PPT = (0.589, 0.686, 1.177, 1.183)


def random_physical_cov(rng: np.random.Generator, n_modes: int, scale: float = 1.0) -> np.ndarray:
    """A generically mixed physical covariance: identity plus a PSD bump."""
    a = rng.normal(size=(2 * n_modes, 2 * n_modes)) * scale
    return np.eye(2 * n_modes) + a @ a.T


def two_user_params(eta: float = 1.0, **kw) -> ProtocolParams:
    p = ProtocolParams(users="two", eta_sb=eta, eta_ab=eta, **kw)
    # equal channel efficiencies cancel in the optimal coefficient
    return p.replace(f_b=optimal_fb(p.t2, 1.0, 1.0, p.v_a, p.v_s))


def three_user_params(eta: float = 1.0, **kw) -> ProtocolParams:
    p = ProtocolParams(users="three", eta_sb=eta, eta_sd=eta, eta_ab=eta, eta_bd=eta, **kw)
    return p.replace(
        f_b=optimal_fb(p.t2, 1.0, 1.0, p.v_a, p.v_s),
        f_d=optimal_fd(eta, p.v_a, p.v_s),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


@pytest.fixture
def three_mode_file(tmp_path):
    path = tmp_path / "three_mode.txt"
    lines = ["# labels: " + " ".join(THREE_MODE_LABELS)]
    lines += [" ".join(f"{v:g}" for v in row) for row in THREE_MODE_REFERENCE]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def four_mode_file(tmp_path):
    path = tmp_path / "four_mode.txt"
    lines = ["# labels: " + " ".join(FOUR_MODE_LABELS)]
    lines += [" ".join(f"{v:g}" for v in row) for row in FOUR_MODE_REFERENCE]
    path.write_text("\n".join(lines) + "\n")
    return str(path)
