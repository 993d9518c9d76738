"""Reconstruction pipeline: cutoff mask, radial filter, backprojection,
and the x1 / pi^dim weight.

With the cutoff identically 1 on a window wide enough to see the scene's
support, the pipeline is the exact inversion formula for plane-centered
spherical means; with a bounded aperture and a finite-order cutoff it is
the approximate reconstruction whose visible singularities are attenuated
by the cutoff value at the line-plane intersection and whose boundary
singularities spawn rotation artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cutoff import CutoffSpec
from .filtering import FilterPlan, apply_cutoff_mask, filter_sinogram
from .geometry import Covector, Aperture, Zone, ZoneKind, classify_covector, \
    line_plane_intersection
from .grids import Axis, ImageGrid, SinogramGrid
from .transform import BallIndicator, Phantom, forward, backproject


@dataclass
class Reconstruction:
    image: ImageGrid
    meta: dict = field(default_factory=dict)


def reconstruct(source, cutoff_spec: CutoffSpec, image_geometry: ImageGrid,
                det_axes=None, t_axis: Axis | None = None,
                plan: FilterPlan | None = None,
                nthreads: int = 0,
                far_field_correction: bool = False) -> Reconstruction:
    """Run the full pipeline on a phantom or an existing sinogram.

    For a phantom source the forward transform is invoked first on the
    given detector/radius grids.  ``far_field_correction`` is forwarded to
    the backprojection; turn it on for wide-window identity references
    (see transform.backproject).  The result records the cutoff order,
    profile family, and detector window in its metadata.
    """
    if isinstance(source, Phantom):
        if det_axes is None or t_axis is None:
            raise ValueError("phantom input needs detector and radius grids")
        sino = forward(source, det_axes, t_axis)
    elif isinstance(source, SinogramGrid):
        sino = source
    else:
        raise TypeError("source must be a Phantom or a SinogramGrid")
    if cutoff_spec.dim != sino.dim:
        raise ValueError("cutoff dimension does not match the data")

    masked = apply_cutoff_mask(sino, cutoff_spec)
    filtered = filter_sinogram(masked, plan)
    image = backproject(filtered, image_geometry, nthreads=nthreads,
                        far_field_correction=far_field_correction)

    x1 = image.axis(0).values() / np.pi ** sino.dim
    shape = (-1,) + (1,) * (sino.dim - 1)
    image = image.like(image.values * x1.reshape(shape))

    if sino.dim == 2:
        profiles = [cutoff_spec.profile]
    else:
        profiles = [cutoff_spec.profile2, cutoff_spec.profile3]
    meta = {
        "dim": sino.dim,
        "cutoff_order": max(p.k for p in profiles),
        "cutoff_family": "*".join(p.family for p in profiles),
        "detector_window": tuple((ax.start, ax.stop) for ax in sino.det_axes),
        "t_window": (sino.t_axis.start, sino.t_axis.stop),
    }
    return Reconstruction(image, meta)


@dataclass(frozen=True)
class EdgePrediction:
    """Predicted fate of one jump-edge point under the limited pipeline:
    the jump across the edge at ``point`` with outward ``normal`` should be
    scaled by ``ratio`` (the cutoff value at the line-plane intersection;
    zero when the line misses the aperture)."""

    point: tuple
    normal: tuple
    plane_point: tuple | None
    zone: Zone
    cutoff_value: float
    ratio: float


def visible_reference(phantom: Phantom, cutoff_spec: CutoffSpec,
                      aperture: Aperture, samples_per_edge: int = 360,
                      boundary_tol: float = 1e-9) -> list[EdgePrediction]:
    """Per-edge-point prediction table for jump phantoms.

    Returns a record for each sampled boundary point of each ball
    component: the predicted reconstructed-jump ratio is the cutoff value
    at the intersection of the normal line with the detector plane
    (visible), zero (invisible), and is reported alongside the zone so
    boundary-zone points can be excluded from quantitative checks.
    Smooth components carry no jump and contribute nothing; component
    types without a known singular structure are rejected.
    """
    from .transform import GaussianBump, SmoothedHalfSpace
    out = []
    for comp in phantom.components:
        if isinstance(comp, (GaussianBump, SmoothedHalfSpace)):
            continue
        if not isinstance(comp, BallIndicator):
            raise TypeError(
                f"unknown singular structure for component {type(comp).__name__}")
        center = np.asarray(comp.center, dtype=float)
        for unit in _sphere_directions(phantom.dim, samples_per_edge):
            point = center + comp.radius * unit
            if point[0] <= 0:
                continue
            cov = Covector(point, unit)
            zone = classify_covector(cov, aperture, tol=boundary_tol)
            z = line_plane_intersection(cov)
            chi = float(cutoff_spec.eval(z)) if z is not None else 0.0
            if zone.kind is ZoneKind.VISIBLE:
                ratio = chi
            elif zone.kind is ZoneKind.INVISIBLE:
                ratio = 0.0
            else:
                ratio = np.nan       # boundary-zone strength is out of scope
            out.append(EdgePrediction(tuple(point), tuple(unit),
                                      None if z is None else tuple(z),
                                      zone, chi, ratio))
    return out


def _sphere_directions(dim: int, n: int):
    if dim == 2:
        ang = 2.0 * np.pi * np.arange(n) / n
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    i = np.arange(n) + 0.5
    u1 = 1.0 - 2.0 * i / n
    rho = np.sqrt(1.0 - u1 * u1)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.stack([u1, rho * np.cos(phi), rho * np.sin(phi)], axis=-1)
