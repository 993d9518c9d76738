"""Sampled data containers and the .srt raster file format.

A sinogram samples g(z, t) on a uniform detector grid (one axis in 2D, two
in 3D) times a uniform radius grid starting strictly above t = 0.  An image
samples a scalar field on a uniform rectangular grid strictly inside the
half space {x1 > 0}.

Rasters serialize to little-endian float64, row-major, behind a fixed
64-byte header:

    bytes  0..7   magic "SRTL0001"
    bytes  8..9   number of axes (uint16)
    bytes 10..15  per-axis sample counts (3 x uint16; unused axes 0)
    bytes 16..39  per-axis minima (3 x float64)
    bytes 40..63  per-axis spacings (3 x float64)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

SRT_MAGIC = b"SRTL0001"
SRT_HEADER = struct.Struct("<8sH3H3d3d")
assert SRT_HEADER.size == 64


@dataclass(frozen=True)
class Axis:
    """Uniform sample axis: values start + i * step, i = 0..count-1."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.count < 2 or not self.step > 0:
            raise ValueError("axis needs step > 0 and at least two samples")

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @staticmethod
    def spanning(lo: float, hi: float, count: int) -> "Axis":
        return Axis(lo, (hi - lo) / (count - 1), count)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.count, self.step)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


@dataclass
class SinogramGrid:
    """Sampled spherical means: detector axes then the radius axis.

    values has shape (nz2, nt) in 2D and (nz2, nz3, nt) in 3D; entries are
    integrals of the scene over circles (length x amplitude) or spheres
    (area x amplitude).
    """

    dim: int
    det_axes: tuple[Axis, ...]
    t_axis: Axis
    values: np.ndarray

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if len(self.det_axes) != self.dim - 1:
            raise ValueError("need one detector axis per aperture dimension")
        if not self.t_axis.start > 0:
            raise ValueError("radius grid must start strictly above 0")
        shape = tuple(ax.count for ax in self.det_axes) + (self.t_axis.count,)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} != grid {shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sinogram values must be finite")

    @property
    def axes(self) -> tuple[Axis, ...]:
        return self.det_axes + (self.t_axis,)

    def detector_points(self) -> np.ndarray:
        """Detector coordinates: shape (nz2,) in 2D, (nz2, nz3, 2) in 3D."""
        if self.dim == 2:
            return self.det_axes[0].values()
        z2, z3 = np.meshgrid(self.det_axes[0].values(),
                             self.det_axes[1].values(), indexing="ij")
        return np.stack([z2, z3], axis=-1)

    def copy(self, values: np.ndarray | None = None) -> "SinogramGrid":
        vals = self.values.copy() if values is None else values
        return SinogramGrid(self.dim, self.det_axes, self.t_axis, vals)


@dataclass
class ImageGrid:
    """Sampled scalar field on a uniform grid strictly inside {x1 > 0}.

    The spacing is the same scalar for every axis; values are indexed
    values[i1, i2(, i3)] with axis 0 the x1 direction.
    """

    dim: int
    mins: tuple[float, ...]
    spacing: float
    values: np.ndarray

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if len(self.mins) != self.dim or self.values.ndim != self.dim:
            raise ValueError("mins/values rank must match dim")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        if not self.mins[0] > 0:
            raise ValueError("image region must lie strictly inside {x1 > 0}")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def axis(self, i: int) -> Axis:
        return Axis(self.mins[i], self.spacing, self.shape[i])

    @property
    def axes(self) -> tuple[Axis, ...]:
        return tuple(self.axis(i) for i in range(self.dim))

    @property
    def maxs(self) -> tuple[float, ...]:
        return tuple(ax.stop for ax in self.axes)

    def points(self) -> np.ndarray:
        """All grid points, shape (*shape, dim)."""
        grids = np.meshgrid(*[ax.values() for ax in self.axes], indexing="ij")
        return np.stack(grids, axis=-1)

    def index_of(self, point) -> tuple[int, ...]:
        """Nearest grid index of a physical point."""
        point = np.asarray(point, dtype=float)
        idx = np.rint((point - np.asarray(self.mins)) / self.spacing).astype(int)
        return tuple(int(np.clip(idx[i], 0, self.shape[i] - 1))
                     for i in range(self.dim))

    def point_at(self, idx) -> np.ndarray:
        return np.asarray(self.mins) + self.spacing * np.asarray(idx, dtype=float)

    def contains(self, point, margin_cells: float = 0.0) -> bool:
        point = np.asarray(point, dtype=float)
        pad = margin_cells * self.spacing
        return all(self.mins[i] + pad <= point[i] <= self.maxs[i] - pad
                   for i in range(self.dim))

    def sample(self, points, order: int = 3) -> np.ndarray:
        """Interpolate the field at physical points, shape (..., dim)."""
        from scipy.ndimage import map_coordinates
        points = np.asarray(points, dtype=float)
        coords = (points - np.asarray(self.mins)) / self.spacing
        flat = coords.reshape(-1, self.dim).T
        vals = map_coordinates(self.values, flat, order=order, mode="nearest")
        return vals.reshape(points.shape[:-1])

    def like(self, values: np.ndarray) -> "ImageGrid":
        return ImageGrid(self.dim, self.mins, self.spacing, values)

    @staticmethod
    def blank(dim: int, mins, maxs, shape) -> "ImageGrid":
        """Zero image covering [mins, maxs] with the given shape.  The
        spacing is inferred from axis 0 and must match every axis."""
        mins = tuple(float(v) for v in mins)
        maxs = tuple(float(v) for v in maxs)
        shape = tuple(int(n) for n in shape)
        spacing = (maxs[0] - mins[0]) / (shape[0] - 1)
        for i in range(1, dim):
            step = (maxs[i] - mins[i]) / (shape[i] - 1)
            if abs(step - spacing) > 1e-9 * spacing:
                raise ValueError("image grid spacing must be uniform across axes")
        return ImageGrid(dim, mins, spacing, np.zeros(shape))


def write_srt(path, axes: tuple[Axis, ...], values: np.ndarray) -> None:
    """Write a raster: 64-byte header then float64 little-endian row-major."""
    naxes = len(axes)
    if naxes not in (2, 3) or values.ndim != naxes:
        raise ValueError("raster must have 2 or 3 axes matching the data rank")
    counts = [ax.count for ax in axes] + [0] * (3 - naxes)
    mins = [ax.start for ax in axes] + [0.0] * (3 - naxes)
    steps = [ax.step for ax in axes] + [0.0] * (3 - naxes)
    header = SRT_HEADER.pack(SRT_MAGIC, naxes, *counts, *mins, *steps)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def read_srt(path) -> tuple[tuple[Axis, ...], np.ndarray]:
    with open(path, "rb") as fh:
        header = fh.read(SRT_HEADER.size)
        magic, naxes, c0, c1, c2, m0, m1, m2, s0, s1, s2 = SRT_HEADER.unpack(header)
        if magic != SRT_MAGIC:
            raise ValueError(f"{path}: not an .srt raster")
        counts = [c0, c1, c2][:naxes]
        mins = [m0, m1, m2][:naxes]
        steps = [s0, s1, s2][:naxes]
        axes = tuple(Axis(mins[i], steps[i], counts[i]) for i in range(naxes))
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(counts)
    return axes, data.copy()


def write_image_srt(path, image: ImageGrid) -> None:
    write_srt(path, image.axes, image.values)


def read_image_srt(path) -> ImageGrid:
    axes, values = read_srt(path)
    steps = {round(ax.step, 15) for ax in axes}
    if len(steps) != 1:
        raise ValueError(f"{path}: not a uniform-spacing image raster")
    return ImageGrid(len(axes), tuple(ax.start for ax in axes),
                     axes[0].step, values)


def write_sinogram_srt(path, sino: SinogramGrid) -> None:
    write_srt(path, sino.axes, sino.values)


def read_sinogram_srt(path) -> SinogramGrid:
    axes, values = read_srt(path)
    return SinogramGrid(len(axes), axes[:-1], axes[-1], values)
