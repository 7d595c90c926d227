"""Hot numeric kernels for pose and twist algebra.

Everything the per-tick loop touches many times lives here as plain
functions over float64 arrays.  When numba is importable the kernels are
compiled with ``@njit(cache=True)``; setting ``SHARED_DOF_NO_NUMBA=1``
(or running without numba installed) keeps the pure NumPy path.  Both
paths share the same source, so behaviour differs at most in the last
ulp.  The pure implementations stay reachable through ``py_func`` (see
``pure_kernel``), which is what benchmarks/kernel_bench.py compares.

Conventions, fixed package-wide:

* Quaternions are (w, x, y, z), unit norm, canonicalized so the first
  nonzero component is positive (in practice: w >= 0).
* Twists are 7-vectors: linear xyz [m/s], angular xyz [rad/s],
  aperture rate [1/s].
* The weighted twist inner product is
  ``lin . lin' + lr^2 * ang . ang' + lg^2 * ap * ap'``
  with lr in m/rad and lg in m, so every component is commensurable in
  meters and one weighted unit of twist moves the hand at 1 m/s
  equivalent.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "quat_canonical",
    "quat_mul",
    "quat_conjugate",
    "quat_rotate",
    "rotvec_to_quat",
    "quat_to_rotvec",
    "weighted_dot",
    "weighted_norm",
    "orthonormalize_pair_vec",
    "integrate_vec",
    "pure_kernel",
]


def _quat_canonical(q):
    # Normalize and fix the double-cover sign: first nonzero component
    # positive.  A numerically dead quaternion falls back to identity.
    out = np.empty(4)
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if n < 1e-15:
        out[0] = 1.0
        out[1] = 0.0
        out[2] = 0.0
        out[3] = 0.0
        return out
    for i in range(4):
        out[i] = q[i] / n
    sign = 0.0
    for i in range(4):
        if out[i] != 0.0:
            sign = 1.0 if out[i] > 0.0 else -1.0
            break
    if sign < 0.0:
        for i in range(4):
            out[i] = -out[i]
    return out


def _quat_mul(a, b):
    out = np.empty(4)
    out[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
    out[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2]
    out[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1]
    out[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]
    return out


def _quat_conjugate(q):
    out = np.empty(4)
    out[0] = q[0]
    out[1] = -q[1]
    out[2] = -q[2]
    out[3] = -q[3]
    return out


def _quat_rotate(q, v):
    # v' = v + 2*w*(u x v) + 2*(u x (u x v)) with u the vector part.
    ux = q[1]
    uy = q[2]
    uz = q[3]
    tx = 2.0 * (uy * v[2] - uz * v[1])
    ty = 2.0 * (uz * v[0] - ux * v[2])
    tz = 2.0 * (ux * v[1] - uy * v[0])
    out = np.empty(3)
    out[0] = v[0] + q[0] * tx + (uy * tz - uz * ty)
    out[1] = v[1] + q[0] * ty + (uz * tx - ux * tz)
    out[2] = v[2] + q[0] * tz + (ux * ty - uy * tx)
    return out


def _rotvec_to_quat(rv):
    theta = math.sqrt(rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2])
    out = np.empty(4)
    if theta < 1e-8:
        # series for sin(t/2)/t and cos(t/2); exact enough below 1e-8
        k = 0.5 - theta * theta / 48.0
        out[0] = 1.0 - theta * theta / 8.0
    else:
        k = math.sin(0.5 * theta) / theta
        out[0] = math.cos(0.5 * theta)
    out[1] = rv[0] * k
    out[2] = rv[1] * k
    out[3] = rv[2] * k
    return _quat_canonical(out)


def _quat_to_rotvec(q):
    # Shortest rotation vector; angle in [0, pi] for canonical input.
    w = q[0]
    s = math.sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if w < 0.0:
        w = -w
        sgn = -1.0
    else:
        sgn = 1.0
    angle = 2.0 * math.atan2(s, w)
    out = np.empty(3)
    if s < 1e-9:
        k = 2.0 * sgn
    else:
        k = sgn * angle / s
    out[0] = q[1] * k
    out[1] = q[2] * k
    out[2] = q[3] * k
    return out


def _weighted_dot(a, b, lr, lg):
    acc = a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    acc += lr * lr * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5])
    acc += lg * lg * a[6] * b[6]
    return acc


def _weighted_norm(a, lr, lg):
    return math.sqrt(_weighted_dot(a, a, lr, lg))


def _orthonormalize_pair_vec(a, b, lr, lg):
    """Gram-Schmidt in the weighted inner product.

    Returns (a_unit, residual_unit_or_zeros, norm_a, residual_norm).
    The caller decides which norms count as degenerate.  The residual is
    measured against the unit-normalized b so the threshold is scale
    free.
    """
    na = _weighted_norm(a, lr, lg)
    a_n = np.zeros(7)
    b_n = np.zeros(7)
    if na < 1e-15:
        return a_n, b_n, na, 0.0
    for i in range(7):
        a_n[i] = a[i] / na
    nb = _weighted_norm(b, lr, lg)
    if nb < 1e-15:
        return a_n, b_n, na, 0.0
    proj = 0.0
    r = np.empty(7)
    for i in range(7):
        r[i] = b[i] / nb
    proj = _weighted_dot(r, a_n, lr, lg)
    for i in range(7):
        r[i] = r[i] - proj * a_n[i]
    nr = _weighted_norm(r, lr, lg)
    if nr > 0.0:
        for i in range(7):
            b_n[i] = r[i] / nr
    return a_n, b_n, na, nr


def _integrate_vec(pos, quat, aperture, twist, dt, lo, hi, vmax, wmax, gmax):
    """One explicit Euler step with speed caps and workspace clamping.

    Linear and angular speeds saturate by magnitude (direction is
    preserved); position clamps per axis to the workspace box; aperture
    clamps to [0, 1].  Orientation integrates by left-multiplying the
    quaternion exponential of the (clamped) angular velocity, i.e. the
    angular part of a twist is expressed in the world frame.
    """
    out_pos = np.empty(3)
    lx = twist[0]
    ly = twist[1]
    lz = twist[2]
    ln = math.sqrt(lx * lx + ly * ly + lz * lz)
    if ln > vmax and ln > 0.0:
        s = vmax / ln
        lx *= s
        ly *= s
        lz *= s
    out_pos[0] = pos[0] + lx * dt
    out_pos[1] = pos[1] + ly * dt
    out_pos[2] = pos[2] + lz * dt
    for i in range(3):
        if out_pos[i] < lo[i]:
            out_pos[i] = lo[i]
        elif out_pos[i] > hi[i]:
            out_pos[i] = hi[i]

    ax = twist[3]
    ay = twist[4]
    az = twist[5]
    an = math.sqrt(ax * ax + ay * ay + az * az)
    if an > wmax and an > 0.0:
        s = wmax / an
        ax *= s
        ay *= s
        az *= s
    rv = np.empty(3)
    rv[0] = ax * dt
    rv[1] = ay * dt
    rv[2] = az * dt
    dq = _rotvec_to_quat(rv)
    out_quat = _quat_canonical(_quat_mul(dq, quat))

    rate = twist[6]
    if rate > gmax:
        rate = gmax
    elif rate < -gmax:
        rate = -gmax
    ap = aperture + rate * dt
    if ap < 0.0:
        ap = 0.0
    elif ap > 1.0:
        ap = 1.0
    return out_pos, out_quat, ap


def _env_flag_disables_numba() -> bool:
    return os.environ.get("SHARED_DOF_NO_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
        "on",
    )


NUMBA_ENABLED = False
if not _env_flag_disables_numba():
    try:
        from numba import njit

        _jit = njit(cache=True)
        # Rebind in dependency order so jitted kernels resolve jitted callees.
        _quat_canonical = _jit(_quat_canonical)
        _quat_mul = _jit(_quat_mul)
        _quat_conjugate = _jit(_quat_conjugate)
        _quat_rotate = _jit(_quat_rotate)
        _rotvec_to_quat = _jit(_rotvec_to_quat)
        _quat_to_rotvec = _jit(_quat_to_rotvec)
        _weighted_dot = _jit(_weighted_dot)
        _weighted_norm = _jit(_weighted_norm)
        _orthonormalize_pair_vec = _jit(_orthonormalize_pair_vec)
        _integrate_vec = _jit(_integrate_vec)
        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

quat_canonical = _quat_canonical
quat_mul = _quat_mul
quat_conjugate = _quat_conjugate
quat_rotate = _quat_rotate
rotvec_to_quat = _rotvec_to_quat
quat_to_rotvec = _quat_to_rotvec
weighted_dot = _weighted_dot
weighted_norm = _weighted_norm
orthonormalize_pair_vec = _orthonormalize_pair_vec
integrate_vec = _integrate_vec


def pure_kernel(kernel):
    """Return the uncompiled implementation of a kernel.

    With numba active that is the wrapped ``py_func``; otherwise the
    kernel already is the pure function.
    """
    return getattr(kernel, "py_func", kernel)
