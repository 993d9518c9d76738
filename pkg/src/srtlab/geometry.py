"""Covector geometry for a planar detector aperture.

The scene lives in the open half space {x1 > 0}; data is collected on a
bounded aperture inside the plane {x1 = 0}: a segment [-1, 1] on the z2
axis in 2D, a rectangle [-a, a] x [-b, b] in 3D.  A covector (x, xi) is
classified by where the full line through x along xi meets the aperture:
its interior (visible), its boundary strata (segment endpoints, rectangle
corners or edges), or not at all (invisible).  Boundary-zone covectors
generate artifact loci by rotation about the stratum they hit: a circle
about an endpoint, a sphere about a corner, a circle about an edge line.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

ANALYTIC_TOL = 1e-12


@dataclass(frozen=True)
class Covector:
    """Base point x in the half space {x1 > 0} plus a nonzero direction."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        if x.shape != xi.shape or x.ndim != 1 or x.size not in (2, 3):
            raise ValueError("x and xi must both be 2- or 3-vectors")
        if not x[0] > 0:
            raise ValueError("base point must satisfy x1 > 0")
        if not np.linalg.norm(xi) > 0:
            raise ValueError("direction must be nonzero")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @property
    def dim(self) -> int:
        return self.x.size

    def unit(self) -> np.ndarray:
        return self.xi / np.linalg.norm(self.xi)


@dataclass(frozen=True)
class Aperture:
    """Detector aperture on the plane {x1 = 0}.

    2D: the fixed segment from (0, -1) to (0, 1).
    3D: the rectangle {0} x [-a, a] x [-b, b].
    """

    dim: int
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.dim == 3 and not (self.a > 0 and self.b > 0):
            raise ValueError("rectangle half-widths must be positive")

    @staticmethod
    def segment() -> "Aperture":
        return Aperture(2)

    @staticmethod
    def rectangle(a: float, b: float) -> "Aperture":
        return Aperture(3, a, b)

    def endpoint(self, sign: int) -> np.ndarray:
        """2D aperture endpoint (0, +-1)."""
        if self.dim != 2:
            raise ValueError("endpoints exist only for the 2D aperture")
        return np.array([0.0, float(sign)])

    def corner(self, j: int) -> np.ndarray:
        """Rectangle corner, numbered 1..4: (a,b), (a,-b), (-a,b), (-a,-b)."""
        if self.dim != 3:
            raise ValueError("corners exist only for the 3D aperture")
        s2, s3 = {1: (1, 1), 2: (1, -1), 3: (-1, 1), 4: (-1, -1)}[j]
        return np.array([0.0, s2 * self.a, s3 * self.b])

    def edge_axis(self, j: int) -> tuple[int, float]:
        """Edge j in 5..8 -> (frozen coordinate index, its value).

        5/6: the edges z3 = +b / -b (running along z2);
        7/8: the edges z2 = -a / +a (running along z3).
        """
        if self.dim != 3:
            raise ValueError("edges exist only for the 3D aperture")
        return {5: (2, self.b), 6: (2, -self.b),
                7: (1, -self.a), 8: (1, self.a)}[j]

    def edge_point(self, j: int, s: float) -> np.ndarray:
        """Point on edge j with running coordinate s."""
        axis, value = self.edge_axis(j)
        z = np.zeros(3)
        z[axis] = value
        z[3 - axis] = s
        return z

    def edge_halfwidth(self, j: int) -> float:
        axis, _ = self.edge_axis(j)
        return self.a if axis == 2 else self.b


class ZoneKind(Enum):
    VISIBLE = "visible"
    INVISIBLE = "invisible"
    BOUNDARY_2D = "boundary"
    CORNER_3D = "corner"
    EDGE_3D = "edge"


@dataclass(frozen=True)
class Zone:
    """Zone of a covector: visible / invisible, or a boundary stratum.

    ``index`` is +-1 for the 2D endpoints, 1..4 for corners, 5..8 for edges.
    """

    kind: ZoneKind
    index: int | None = None

    def __post_init__(self):
        if self.kind is ZoneKind.BOUNDARY_2D and self.index not in (1, -1):
            raise ValueError("2D boundary zone needs endpoint sign +-1")
        if self.kind is ZoneKind.CORNER_3D and self.index not in (1, 2, 3, 4):
            raise ValueError("corner index must be 1..4")
        if self.kind is ZoneKind.EDGE_3D and self.index not in (5, 6, 7, 8):
            raise ValueError("edge index must be 5..8")

    @property
    def is_boundary(self) -> bool:
        return self.kind in (ZoneKind.BOUNDARY_2D, ZoneKind.CORNER_3D,
                             ZoneKind.EDGE_3D)

    @staticmethod
    def visible() -> "Zone":
        return Zone(ZoneKind.VISIBLE)

    @staticmethod
    def invisible() -> "Zone":
        return Zone(ZoneKind.INVISIBLE)

    @staticmethod
    def boundary(sign: int) -> "Zone":
        return Zone(ZoneKind.BOUNDARY_2D, sign)

    @staticmethod
    def corner(j: int) -> "Zone":
        return Zone(ZoneKind.CORNER_3D, j)

    @staticmethod
    def edge(j: int) -> "Zone":
        return Zone(ZoneKind.EDGE_3D, j)


def line_plane_intersection(cov: Covector):
    """Intersection of the full line through x along xi with {x1 = 0},
    or None when the line is parallel to the plane."""
    if cov.xi[0] == 0.0:
        return None
    return cov.x - (cov.x[0] / cov.xi[0]) * cov.xi


def classify_covector(cov: Covector, aperture: Aperture,
                      tol: float = ANALYTIC_TOL) -> Zone:
    """Zone of a covector relative to the aperture.

    Classification uses the full line (replacing xi by any nonzero multiple
    gives the same zone).  ``tol`` is the membership slack for detecting the
    measure-zero boundary strata on sampled inputs.
    """
    if aperture.dim != cov.dim:
        raise ValueError("covector and aperture dimensions differ")
    z = line_plane_intersection(cov)
    if z is None:
        return Zone.invisible()
    if cov.dim == 2:
        s = z[1]
        if abs(abs(s) - 1.0) <= tol:
            return Zone.boundary(1 if s > 0 else -1)
        return Zone.visible() if abs(s) < 1.0 else Zone.invisible()
    a, b = aperture.a, aperture.b
    z2, z3 = z[1], z[2]
    if abs(z2) > a + tol or abs(z3) > b + tol:
        return Zone.invisible()
    on2 = abs(abs(z2) - a) <= tol
    on3 = abs(abs(z3) - b) <= tol
    if on2 and on3:
        j = {(1, 1): 1, (1, -1): 2, (-1, 1): 3, (-1, -1): 4}[
            (1 if z2 > 0 else -1, 1 if z3 > 0 else -1)]
        return Zone.corner(j)
    if on3:
        return Zone.edge(5 if z3 > 0 else 6)
    if on2:
        return Zone.edge(8 if z2 > 0 else 7)
    return Zone.visible()


def _rotation_center(cov: Covector, zone: Zone, aperture: Aperture) -> np.ndarray:
    if zone.kind is ZoneKind.BOUNDARY_2D:
        return aperture.endpoint(zone.index)
    if zone.kind is ZoneKind.CORNER_3D:
        return aperture.corner(zone.index)
    raise ValueError("point rotation center requires an endpoint/corner zone")


def _edge_anchor(cov: Covector, zone: Zone, aperture: Aperture) -> np.ndarray:
    """Aperture edge point shared by both legs of an edge-rotation pair:
    the line-plane intersection of the generator, projected onto the edge."""
    z = line_plane_intersection(cov)
    if z is None:
        raise ValueError("edge-zone covector must intersect the plane")
    axis, value = aperture.edge_axis(zone.index)
    half = aperture.edge_halfwidth(zone.index)
    anchor = np.zeros(3)
    anchor[axis] = value
    anchor[3 - axis] = np.clip(z[3 - axis], -half, half)
    return anchor


def artifact_locus(cov: Covector, zone: Zone, aperture: Aperture,
                   nsamples: int) -> list[Covector]:
    """Sample the artifact locus generated by a boundary-zone covector.

    Endpoint / corner zones: rotations of (x, xi) about the boundary point,
    i.e. covectors radial from it at equal distance.  Edge zones: rotations
    about the edge line, which freeze the along-edge coordinate.  Samples
    are restricted to the half space x1 > 0.
    """
    if not zone.is_boundary:
        raise ValueError("artifact loci exist only for boundary-zone covectors")
    if nsamples < 1:
        raise ValueError("need at least one sample")
    y, eta = cov.x, cov.xi

    if zone.kind in (ZoneKind.BOUNDARY_2D, ZoneKind.CORNER_3D):
        center = _rotation_center(cov, zone, aperture)
        rvec = y - center
        radius = np.linalg.norm(rvec)
        tau = float(np.dot(eta, rvec)) / radius ** 2
        out = []
        if cov.dim == 2:
            # open half circle x1 > 0
            angles = -np.pi / 2 + np.pi * (np.arange(nsamples) + 0.5) / nsamples
            for th in angles:
                x = center + radius * np.array([np.cos(th), np.sin(th)])
                out.append(Covector(x, tau * (x - center)))
        else:
            # spiral covering of the open hemisphere u1 > 0
            golden = np.pi * (3.0 - np.sqrt(5.0))
            for i in range(nsamples):
                u1 = (i + 0.5) / nsamples          # in (0, 1)
                rho = np.sqrt(1.0 - u1 * u1)
                phi = golden * i
                u = np.array([u1, rho * np.cos(phi), rho * np.sin(phi)])
                x = center + radius * u
                out.append(Covector(x, tau * (x - center)))
        return out

    # edge rotation: the along-edge coordinate of the base point is frozen
    anchor = _edge_anchor(cov, zone, aperture)
    axis, _value = aperture.edge_axis(zone.index)
    run = 3 - axis                                  # along-edge coordinate
    plane_center = np.array([0.0, anchor[axis]])    # in (x1, x_axis) coords
    y_plane = np.array([y[0], y[axis]])
    radius = np.linalg.norm(y_plane - plane_center)
    tau = eta[0] / y[0]                             # eta = tau (y - anchor), anchor1 = 0
    angles = -np.pi / 2 + np.pi * (np.arange(nsamples) + 0.5) / nsamples
    out = []
    for th in angles:
        x = np.zeros(3)
        x[0] = radius * np.cos(th)
        x[axis] = anchor[axis] + radius * np.sin(th)
        x[run] = y[run]
        out.append(Covector(x, tau * (x - anchor)))
    return out
