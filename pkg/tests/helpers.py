"""Shared fixtures data, random instance generators and independent oracles."""
import numpy as np

from lyaptrack import PlantModel, ReferenceModel, place_gain

# Worked-example data, transcribed independently of lyaptrack.builtin.
A = np.array([[2.0, -3.0], [0.0, 2.0]])
B = np.array([[1.0, -2.0], [9.0, -1.0]])
C = np.array([[0.5, 1.0]])
X0 = np.array([[0.0], [1.0]])
AM3 = np.array([[0.9, 1.0, 1.0], [0.0, 0.9, 1.0], [0.0, 0.0, 0.9]])
CM3 = np.array([[1.0, 0.9, 0.9]])
XM3 = np.array([[0.0], [1.0], [0.1]])
AM2 = AM3[:2, :2].copy()
CM2 = CM3[:, :2].copy()
XM2 = np.array([[0.0], [1.0]])
ALPHA = 2.0
BETA = np.array([[0.3], [0.5]])

# Published 4-decimal values.
K_MAIN = np.array([[0.1706, -0.3176], [1.5353, -1.6588]])
K_FAST = np.array([[0.1471, -0.3176], [1.3235, -1.6588]])
EX1 = {
    "G": np.array([[0.1276, 0.1149, 0.1149], [-0.2509, -0.2258, -0.2258]]),
    "Ge": np.array([[1.2474, 1.1227, 1.1227], [0.3763, 0.3387, 0.3387]]),
    "H": np.array([[-0.0262, -0.0527, -0.0789], [-0.5744, -1.1553, -1.7297]]),
}
EX2 = {
    "G": np.array([[0.1276, 0.1149], [-0.2509, -0.2258]]),
    "Ge": np.array([[1.2474, 1.1227], [0.3763, 0.3387]]),
    "H": np.array([[-0.0262, -0.0527], [-0.5744, -1.1553]]),
}
PUBLISHED_TOL = 5e-4


def plant():
    return PlantModel(A, B, C, X0)


def reference3():
    return ReferenceModel(AM3, CM3, XM3)


def reference2():
    return ReferenceModel(AM2, CM2, XM2)


def modal_error(i, target_diag, ge):
    """Closed-form output error for the disturbed example with a diagonal closed loop.

    With ``A + BK = diag(l1, l2)`` the error state evolves mode by mode, so
    ``e_i = sum_j C_j * xt0_j * l_j**i`` where ``xt0 = alpha x0 + beta - Ge xm0``.
    """
    xt0 = ALPHA * X0 + BETA - ge @ XM2
    coeffs = C.ravel() * xt0.ravel()
    return float(sum(c * lam**i for c, lam in zip(coeffs, target_diag)))


def modal_minimal_time(coeffs, lams, epsilon, horizon=2000):
    """Brute-force smallest T with |sum c_j l_j^i| <= epsilon for all i in [T, horizon]."""
    errs = [abs(sum(c * lam**i for c, lam in zip(coeffs, lams))) for i in range(horizon + 1)]
    last_bad = max((i for i, e in enumerate(errs) if e > epsilon), default=-1)
    return last_bad + 1


def random_stable(rng, n, radius=0.95, min_abs=0.0):
    """``V D V^-1`` with real eigenvalues strictly inside ``radius`` in magnitude."""
    while True:
        V = np.eye(n) + 0.4 * rng.standard_normal((n, n))
        if np.linalg.cond(V) < 50:
            break
    mags = rng.uniform(min_abs, radius, n)
    signs = rng.choice([-1.0, 1.0], n)
    return V @ np.diag(mags * signs) @ np.linalg.inv(V)


def random_spd(rng, n):
    M = rng.standard_normal((n, n))
    return M @ M.T + n * np.eye(n)


def random_instance(rng, n=None):
    """A feasible synthesis problem: full-row-rank B, invertible stable target."""
    n = int(rng.integers(1, 5)) if n is None else n
    m = n + int(rng.integers(0, 2))
    p = int(rng.integers(1, n + 1))
    nm = int(rng.integers(1, 5))
    A_ = rng.standard_normal((n, n))
    while True:
        B_ = rng.standard_normal((n, m))
        if np.linalg.cond(B_ @ B_.T) < 1e3:
            break
    plant_ = PlantModel(A_, B_, rng.standard_normal((p, n)), rng.standard_normal((n, 1)))
    reference_ = ReferenceModel(
        random_stable(rng, nm, radius=1.0),
        rng.standard_normal((p, nm)),
        rng.standard_normal((nm, 1)),
    )
    while True:
        target = random_stable(rng, n, radius=0.95, min_abs=0.1)
        K = place_gain(plant_, target)
        R = plant_.C @ np.linalg.solve(target, B_ @ K)
        # Nearly rank-deficient R makes the instance numerically infeasible.
        if np.linalg.cond(R @ R.T) < 1e6:
            return plant_, reference_, K, target


def rounding_floor(traj):
    """Absolute floating-point noise level of the recorded output errors.

    Each step injects errors of order eps * (|A x| + |B u| + |Ge xm|) into the
    error state; the stable loop keeps them from growing, so the recorded
    ``e_i`` cannot be resolved below roughly that level times ``||C||``.
    An exact bound is compared against simulation only above this floor.
    """
    p, g = traj.plant, traj.gains
    scale = max(
        np.linalg.norm(p.A @ s.x) + np.linalg.norm(p.B @ s.u) + np.linalg.norm(g.Ge @ s.xm)
        for s in traj.steps
    )
    return 1e-12 * np.linalg.norm(p.C, 2) * scale
