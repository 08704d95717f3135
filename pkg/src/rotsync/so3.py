"""Rotations as 3x3 matrices: tangent-space maps, distance metrics,
SO(3) projection, and random sampling.

All functions take and return plain numpy arrays. Matrices are the working
representation throughout the package; quaternions (w, x, y, z convention)
appear only at the boundaries, for file IO and uniform sampling.
"""

import warnings

import numpy as np

# Orthonormality / determinant tolerance for accepting a raw matrix as-is.
VALIDATION_TOL = 1e-9

_EYE3 = np.eye(3)


class SingularInputError(ValueError):
    """Matrix is rank-deficient beyond tolerance; projection is ill-posed."""


def skew(v):
    """3x3 skew-symmetric (cross-product) matrix of a 3-vector."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def is_rotation(m, tol=VALIDATION_TOL):
    """True if m is orthonormal with determinant +1 within tol."""
    m = np.asarray(m)
    if m.shape != (3, 3):
        return False
    return (np.linalg.norm(m.T @ m - _EYE3) <= tol
            and abs(np.linalg.det(m) - 1.0) <= tol)


def ensure_rotation(m, tol=VALIDATION_TOL):
    """Validate a raw 3x3 matrix as a rotation, re-projecting when off.

    Pairwise registration outputs are rarely exactly orthonormal, so a
    matrix failing the tolerance is projected onto SO(3) with a warning
    instead of being rejected.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if is_rotation(m, tol):
        return m
    warnings.warn("matrix is not orthonormal within tolerance; projecting onto SO(3)")
    return project_to_so3(m)


def exp_map(v):
    """Rodrigues formula: axis-angle 3-vector to rotation matrix."""
    v = np.asarray(v, dtype=np.float64)
    angle = np.linalg.norm(v)
    k = skew(v)
    if angle < 1e-8:
        # second-order Taylor; exact enough at this scale and division-free
        return _EYE3 + k + 0.5 * (k @ k)
    return (_EYE3 + (np.sin(angle) / angle) * k
            + ((1.0 - np.cos(angle)) / angle ** 2) * (k @ k))


def log_map(r):
    """Rotation matrix to axis-angle 3-vector with angle in [0, pi]."""
    r = np.asarray(r, dtype=np.float64)
    trace = r[0, 0] + r[1, 1] + r[2, 2]
    if trace < -1.0 + 1e-6:
        # Near angle pi the generic branch divides by sin(angle) ~ 0; the
        # quaternion vector part stays well conditioned there.
        w, x, y, z = mat_to_quat(r)
        vec = np.array([x, y, z])
        vec_norm = np.linalg.norm(vec)
        if vec_norm == 0.0:
            return np.zeros(3)
        angle = 2.0 * np.arctan2(vec_norm, w)
        return vec * (angle / vec_norm)
    cos_angle = min(1.0, max(-1.0, (trace - 1.0) / 2.0))
    angle = np.arccos(cos_angle)
    axis_raw = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    if angle < 1e-7:
        return 0.5 * axis_raw
    return axis_raw * (0.5 * angle / np.sin(angle))


def geodesic_distance(r1, r2):
    """Riemannian distance: the rotation angle of r1 @ r2.T, in [0, pi]."""
    return float(np.linalg.norm(log_map(np.asarray(r1) @ np.asarray(r2).T)))


def chordal_distance(r1, r2):
    """Frobenius-norm distance; equals 2*sqrt(2)*sin(theta/2) for angle theta."""
    return float(np.linalg.norm(np.asarray(r1) - np.asarray(r2)))


def project_to_so3(m):
    """Nearest rotation in Frobenius norm, via SVD (Procrustes projection)."""
    m = np.asarray(m, dtype=np.float64)
    u, s, vt = np.linalg.svd(m)
    if s[-1] <= 1e-12:
        raise SingularInputError(
            f"matrix is singular (smallest singular value {s[-1]:.3e})")
    d = np.linalg.det(u @ vt)
    return u @ np.diag([1.0, 1.0, d]) @ vt


def random_rotation(rng):
    """Haar-uniform rotation, sampled via a uniform unit quaternion."""
    q = rng.normal(size=4)
    return quat_to_mat(q)


def random_perturbation(sigma_deg, rng):
    """Small random rotation: exp of a zero-mean isotropic Gaussian 3-vector
    with per-axis standard deviation sigma_deg (degrees)."""
    if sigma_deg < 0:
        raise ValueError("sigma_deg must be nonnegative")
    v = rng.normal(0.0, np.deg2rad(sigma_deg), size=3)
    return exp_map(v)


def quat_to_mat(q):
    """Unit-normalize a quaternion (w, x, y, z) and convert to a matrix."""
    q = np.asarray(q, dtype=np.float64)
    norm = np.linalg.norm(q)
    if norm < 1e-12:
        raise ValueError("quaternion has (near-)zero norm")
    w, x, y, z = q / norm
    return np.array([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])


def mat_to_quat(m):
    """Rotation matrix to unit quaternion (w, x, y, z) with w >= 0.

    Shepperd's method: branch on the largest of trace and diagonal entries
    so the square root argument stays well away from zero.
    """
    m = np.asarray(m, dtype=np.float64)
    t = m[0, 0] + m[1, 1] + m[2, 2]
    if t > 0:
        s = np.sqrt(t + 1.0) * 2.0
        q = np.array([0.25 * s,
                      (m[2, 1] - m[1, 2]) / s,
                      (m[0, 2] - m[2, 0]) / s,
                      (m[1, 0] - m[0, 1]) / s])
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = np.array([(m[2, 1] - m[1, 2]) / s,
                      0.25 * s,
                      (m[0, 1] + m[1, 0]) / s,
                      (m[0, 2] + m[2, 0]) / s])
    elif m[1, 1] > m[2, 2]:
        s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = np.array([(m[0, 2] - m[2, 0]) / s,
                      (m[0, 1] + m[1, 0]) / s,
                      0.25 * s,
                      (m[1, 2] + m[2, 1]) / s])
    else:
        s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = np.array([(m[1, 0] - m[0, 1]) / s,
                      (m[0, 2] + m[2, 0]) / s,
                      (m[1, 2] + m[2, 1]) / s,
                      0.25 * s])
    q = q / np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    return q
