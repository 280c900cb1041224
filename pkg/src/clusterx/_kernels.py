"""Per-sample protocol arithmetic for the Monte Carlo oracle.

``protocol_outputs`` dispatches to the numba kernel when acceleration is on
and to the vectorized numpy version otherwise. Both consume the same
standard-normal draws, laid out per sample as the twelve noise labels
``X0_a1, Y0_a1, ..., X0_a4, Y0_a4, X_t, Y_t, X_c, Y_c``.

``params`` packs, in order: four squeezing values, four axis flags (1 for
X-squeezed, 0 for Y-squeezed), four pre-rotation flags (1 for a -90 degree
turn), the 4x4 network row-major, four gains, four input means and the
cluster flag. That is 37 floats.
"""
import numpy as np

from ._accel import USING_NUMBA, njit

N_PARAMS = 37
_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_SQRT2 = np.sqrt(2.0)


def pack_params(r, axes_x, rotated, network, gains, means, use_cluster) -> np.ndarray:
    p = np.empty(N_PARAMS)
    p[0:4] = r
    p[4:8] = axes_x
    p[8:12] = rotated
    p[12:28] = np.asarray(network, dtype=float).ravel()
    p[28:32] = gains
    p[32:36] = means
    p[36] = 1.0 if use_cluster else 0.0
    return p


@njit(nogil=True)
def _outputs_nb(z, p):
    n = z.shape[0]
    out = np.empty((n, 4))
    ax = np.empty(4)
    ay = np.empty(4)
    bx = np.empty(4)
    by = np.empty(4)
    for s in range(n):
        for k in range(4):
            x0 = z[s, 2 * k]
            y0 = z[s, 2 * k + 1]
            if p[36] > 0.5:
                lo = np.exp(-p[k])
                hi = np.exp(p[k])
                if p[4 + k] > 0.5:
                    x = lo * x0
                    y = hi * y0
                else:
                    x = hi * x0
                    y = lo * y0
                if p[8 + k] > 0.5:
                    ax[k] = -y
                    ay[k] = x
                else:
                    ax[k] = x
                    ay[k] = y
            else:
                ax[k] = x0
                ay[k] = y0
        for i in range(4):
            sx = 0.0
            sy = 0.0
            for j in range(4):
                sx += p[12 + 4 * i + j] * ax[j]
                sy += p[12 + 4 * i + j] * ay[j]
            bx[i] = sx
            by[i] = sy
        xt = p[32] + z[s, 8]
        yt = p[33] + z[s, 9]
        xc = p[34] + z[s, 10]
        yc = p[35] + z[s, 11]
        x_t1 = (xt + bx[1]) * _INV_SQRT2
        y_t2 = (-yt + by[1]) * _INV_SQRT2
        x_c1 = (-xc + bx[2]) * _INV_SQRT2
        y_c2 = (yc + by[2]) * _INV_SQRT2
        out[s, 0] = bx[0] + _SQRT2 * p[28] * (x_t1 + x_c1)
        out[s, 1] = by[0] - _SQRT2 * p[29] * y_t2
        out[s, 2] = bx[3] - _SQRT2 * p[30] * x_c1
        out[s, 3] = by[3] + _SQRT2 * p[31] * (y_c2 - y_t2)
    return out


def _outputs_np(z, p):
    x0 = z[:, 0:8:2]
    y0 = z[:, 1:8:2]
    if p[36] > 0.5:
        lo, hi = np.exp(-p[0:4]), np.exp(p[0:4])
        xsq = p[4:8] > 0.5
        x = np.where(xsq, lo, hi) * x0
        y = np.where(xsq, hi, lo) * y0
        rot = p[8:12] > 0.5
        ax = np.where(rot, -y, x)
        ay = np.where(rot, x, y)
    else:
        ax, ay = x0, y0
    O = p[12:28].reshape(4, 4)
    bx = ax @ O.T
    by = ay @ O.T
    xt = p[32] + z[:, 8]
    yt = p[33] + z[:, 9]
    xc = p[34] + z[:, 10]
    yc = p[35] + z[:, 11]
    x_t1 = (xt + bx[:, 1]) * _INV_SQRT2
    y_t2 = (-yt + by[:, 1]) * _INV_SQRT2
    x_c1 = (-xc + bx[:, 2]) * _INV_SQRT2
    y_c2 = (yc + by[:, 2]) * _INV_SQRT2
    out = np.empty((z.shape[0], 4))
    out[:, 0] = bx[:, 0] + _SQRT2 * p[28] * (x_t1 + x_c1)
    out[:, 1] = by[:, 0] - _SQRT2 * p[29] * y_t2
    out[:, 2] = bx[:, 3] - _SQRT2 * p[30] * x_c1
    out[:, 3] = by[:, 3] + _SQRT2 * p[31] * (y_c2 - y_t2)
    return out


@njit(nogil=True)
def _moments_nb(x):
    n, d = x.shape
    mean = np.zeros(d)
    for s in range(n):
        for i in range(d):
            mean[i] += x[s, i]
    for i in range(d):
        mean[i] /= n
    m2 = np.zeros((d, d))
    for s in range(n):
        for i in range(d):
            di = x[s, i] - mean[i]
            for j in range(i, d):
                m2[i, j] += di * (x[s, j] - mean[j])
    for i in range(d):
        for j in range(i):
            m2[i, j] = m2[j, i]
    return mean, m2


def _moments_np(x):
    mean = x.mean(axis=0)
    c = x - mean
    return mean, c.T @ c


def protocol_outputs(z, params, backend=None):
    """Output quadratures ``(X_t, Y_t, X_c, Y_c)`` for each row of draws ``z``."""
    if _use_numba(backend):
        return _outputs_nb(np.ascontiguousarray(z), params)
    return _outputs_np(z, params)


def batch_moments(x, backend=None):
    """Mean vector and centered co-moment matrix ``sum (x - mean)(x - mean)^T``."""
    if _use_numba(backend):
        return _moments_nb(np.ascontiguousarray(x))
    return _moments_np(x)


def _use_numba(backend) -> bool:
    if backend is None:
        return USING_NUMBA
    if backend == "numba":
        if not USING_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable or disabled")
        return True
    if backend == "numpy":
        return False
    raise ValueError(f"backend must be 'numba', 'numpy' or None, got {backend!r}")
