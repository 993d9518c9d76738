"""Radial filter of order (dim - 1) and the aperture cutoff mask.

The filter acts per detector row in the radius variable t.  Its phase is
diagonal in u = t^2, so rows are resampled onto a uniform u grid where the
operator is an exact Fourier multiplier |lambda|^(dim-1); the overall 2*pi
comes from the continuum convention of the lambda integral, fixed so that
the full-aperture composition reproduces the scene exactly (validated
end to end by the reconstruction tests).

Resampling uses H(u) = h(sqrt(u)) / (2 sqrt(u)) with H(0) = 0, which is
legitimate only because the scene is supported away from the plane; rows
with signal in the first two radius samples are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cutoff import CutoffSpec
from .grids import Axis, SinogramGrid
from .kernels import interp_uniform

_ROW_CHUNK = 256


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


@dataclass(frozen=True)
class FilterPlan:
    """Uniform u = t^2 grid and padding for the multiplier filter."""

    dim: int
    t_axis: Axis
    n_u: int
    pad: int = 4

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.pad < 2:
            raise ValueError("pad factor must be at least 2")
        if not _is_pow2(self.n_u * self.pad):
            raise ValueError("n_u * pad must be a power of two")
        if self.n_u < 2 * self.t_axis.count:
            raise ValueError("u grid must resolve the t grid (n_u >= 2 n_t)")

    @property
    def order(self) -> int:
        return self.dim - 1

    @property
    def u_max(self) -> float:
        return self.t_axis.stop ** 2

    @property
    def du(self) -> float:
        return self.u_max / (self.n_u - 1)

    @staticmethod
    def for_sinogram(sino: SinogramGrid, pad: int = 4) -> "FilterPlan":
        return FilterPlan(sino.dim, sino.t_axis,
                          next_pow2(2 * sino.t_axis.count), pad)


def _multiplier(plan: FilterPlan) -> np.ndarray:
    nfft = plan.n_u * plan.pad
    lam = 2.0 * np.pi * np.fft.fftfreq(nfft, d=plan.du)
    return np.abs(lam) ** plan.order


def apply_multiplier_u(rows_u: np.ndarray, plan: FilterPlan) -> np.ndarray:
    """|lambda|^(dim-1) Fourier multiplier on u-grid samples (trailing
    axis), zero padded, including the 2*pi convention constant."""
    nfft = plan.n_u * plan.pad
    mult = _multiplier(plan)
    padded = np.zeros(rows_u.shape[:-1] + (nfft,))
    padded[..., :plan.n_u] = rows_u
    spec = np.fft.ifft(padded, axis=-1)
    out = np.fft.fft(mult * spec, axis=-1)
    return 2.0 * np.pi * np.real(out[..., :plan.n_u])


def _check_support(rows: np.ndarray) -> None:
    scale = np.max(np.abs(rows)) if rows.size else 0.0
    if scale == 0.0:
        return
    if np.max(np.abs(rows[..., :2])) > 1e-12 * scale:
        raise ValueError(
            "rows must vanish in the first two radius samples "
            "(scene support must stay clear of the detector plane)")


def apply_radial_filter(rows: np.ndarray, plan: FilterPlan) -> np.ndarray:
    """Filter sampled rows h(t) (trailing axis = radius) into (Ph)(t)."""
    rows = np.asarray(rows, dtype=float)
    if rows.shape[-1] != plan.t_axis.count:
        raise ValueError("row length does not match the plan's t grid")
    _check_support(rows)
    t0, dt = plan.t_axis.start, plan.t_axis.step
    u = plan.du * np.arange(plan.n_u)
    tq = np.sqrt(u)
    out = np.empty_like(rows)
    flat = rows.reshape(-1, rows.shape[-1])
    oflat = out.reshape(-1, rows.shape[-1])
    t2 = plan.t_axis.values() ** 2
    for lo in range(0, flat.shape[0], _ROW_CHUNK):
        chunk = flat[lo:lo + _ROW_CHUNK]
        h_at_u = interp_uniform(chunk, t0, dt, tq, oob="zero")
        with np.errstate(divide="ignore", invalid="ignore"):
            H = np.where(tq > 0.0, h_at_u / (2.0 * tq), 0.0)
        ph_u = apply_multiplier_u(H, plan)
        oflat[lo:lo + _ROW_CHUNK] = interp_uniform(ph_u, 0.0, plan.du, t2,
                                                   oob="error")
    return out


def filter_sinogram(sino: SinogramGrid, plan: FilterPlan | None = None) -> SinogramGrid:
    plan = plan or FilterPlan.for_sinogram(sino)
    if plan.dim != sino.dim or plan.t_axis != sino.t_axis:
        raise ValueError("filter plan does not match the sinogram geometry")
    return sino.copy(values=apply_radial_filter(sino.values, plan))


def apply_cutoff_mask(sino: SinogramGrid, spec: CutoffSpec) -> SinogramGrid:
    """Multiply each detector column by the aperture cutoff (zero outside
    the aperture)."""
    if spec.dim != sino.dim:
        raise ValueError("cutoff and sinogram dimensions differ")
    chi = spec.eval_detector(sino.detector_points())
    return sino.copy(values=sino.values * chi[..., None])
