"""Pure-numpy kernels: uniform-grid cubic interpolation and backprojection.

These mirror the compiled extension exactly (same 4-point Lagrange stencil,
same accumulation order over detectors), so results agree to round-off and
the extension is a drop-in speedup.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def _lagrange_weights(s):
    """Cubic Lagrange weights on stencil offsets {-1, 0, 1, 2} at local
    coordinate s measured from the stencil's second node."""
    w_m1 = -s * (s - 1.0) * (s - 2.0) / 6.0
    w_0 = (s * s - 1.0) * (s - 2.0) / 2.0
    w_1 = -(s + 1.0) * s * (s - 2.0) / 2.0
    w_2 = s * (s * s - 1.0) / 6.0
    return w_m1, w_0, w_1, w_2


def interp_uniform(vals, start, step, xq, oob="zero"):
    """Cubic interpolation of samples vals[i] at start + i*step.

    Near the axis ends the 4-point stencil shifts inward (still cubic).
    Queries outside [start, last] return 0 for oob="zero" or raise for
    oob="error".  vals may have leading batch dimensions; xq then applies
    to the trailing axis.
    """
    vals = np.asarray(vals, dtype=float)
    xq = np.asarray(xq, dtype=float)
    n = vals.shape[-1]
    if n < 4:
        raise ValueError("need at least 4 samples for cubic interpolation")
    u = (xq - start) / step
    slack = 1e-9 * n
    inside = (u >= -slack) & (u <= n - 1.0 + slack)
    if oob == "error" and not np.all(inside):
        raise ValueError("interpolation query outside the sampled axis")
    uc = np.clip(u, 0.0, n - 1.0)
    j = np.clip(np.floor(uc).astype(np.intp), 1, n - 3)
    s = uc - j
    w = _lagrange_weights(s)
    out = sum(w[m] * np.take(vals, j - 1 + m, axis=-1) for m in range(4))
    if oob == "zero":
        out = np.where(inside, out, 0.0)
    return out


def backproject_2d(values, t_start, t_step, z, wz, x1, x2, nthreads=0):
    """Sum over detectors of w_z * g(z, |x - z|) on a 2D image grid.

    values: (nz, nt) sinogram; z, wz: detector positions and quadrature
    weights; x1, x2: image axes.  Radii must fall in the interior stencil
    range of the t axis; anything outside raises.
    """
    values = np.asarray(values, dtype=float)
    nt = values.shape[1]
    out = np.zeros((x1.size, x2.size))
    x1sq = (x1 * x1)[:, None]
    for iz in range(z.size):
        dist = np.sqrt(x1sq + (x2[None, :] - z[iz]) ** 2)
        u = (dist - t_start) / t_step
        if u.min() < 1.0 or u.max() >= nt - 2.0:
            raise ValueError("backprojection radius outside the sampled t range")
        j = np.floor(u).astype(np.intp)
        s = u - j
        w = _lagrange_weights(s)
        g = values[iz]
        out += wz[iz] * (w[0] * g[j - 1] + w[1] * g[j]
                         + w[2] * g[j + 1] + w[3] * g[j + 2])
    return out


def backproject_3d(values, t_start, t_step, z2, z3, w2, w3, x1, x2, x3,
                   nthreads=0):
    """3D analog of backproject_2d: values is (nz2, nz3, nt), detector
    weights are the per-axis quadrature weights (outer product applied)."""
    values = np.asarray(values, dtype=float)
    nt = values.shape[2]
    n1, n2, n3 = x1.size, x2.size, x3.size
    out = np.zeros((n1, n2, n3))
    x1sq = (x1 * x1)[:, None, None]
    for i2 in range(z2.size):
        d2 = (x2[None, :, None] - z2[i2]) ** 2
        base = x1sq + d2
        for i3 in range(z3.size):
            dist = np.sqrt(base + (x3[None, None, :] - z3[i3]) ** 2)
            u = (dist - t_start) / t_step
            if u.min() < 1.0 or u.max() >= nt - 2.0:
                raise ValueError(
                    "backprojection radius outside the sampled t range")
            j = np.floor(u).astype(np.intp)
            s = u - j
            w = _lagrange_weights(s)
            g = values[i2, i3]
            out += (w2[i2] * w3[i3]) * (w[0] * g[j - 1] + w[1] * g[j]
                                        + w[2] * g[j + 1] + w[3] * g[j + 2])
    return out
