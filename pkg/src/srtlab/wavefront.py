"""Sampled canonical relations and the singularity-strength bookkeeping.

Relations live on pairs of covectors.  Image-side covectors are
geometry.Covector; data-side covectors (detector coordinates plus radius)
are DataCovector.  Membership predicates implement the defining equalities
of each relation with a tolerance; composition of sampled relations matches
intermediate covectors nearest-neighbor within the tolerance, in position
and in normalized direction.

Relations:

* diagonal          -- identical covector pairs whose line meets the aperture
* endpoint (+-1)    -- rotations about a 2D aperture endpoint
* vertex (1..4)     -- rotations about a 3D aperture corner
* edge (5..8)       -- rotations about a 3D aperture edge line (the
                       along-edge coordinate is frozen)
* data_graph        -- the forward transform's graph relation between image
                       covectors and data covectors on matching spheres
* data_boundary     -- the extra relation produced by cutting the data at
                       the aperture boundary: the in-plane data frequency
                       gains an arbitrary component normal to the stratum

The strength table: a kernel of order m on a point-rotation relation maps
H^s to H^(s - m - (n-1)/2), on a line-rotation relation to H^(s - m - 1/2).
With the cutoff vanishing to order k at the aperture boundary the kernel
orders are -k-1/2 (2D endpoints), -2k-1 (3D corners), -k-1/2 (3D edges),
so artifacts are k, 2k, and k orders smoother than their source.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .cutoff import CutoffSpec
from .geometry import (Aperture, Covector, Zone, ZoneKind, artifact_locus,
                       classify_covector, line_plane_intersection)


@dataclass(frozen=True)
class DataCovector:
    """Covector over data space: point = detector coords + radius (last),
    direction of the same size."""

    point: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.point, dtype=float))
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        if p.shape != xi.shape or p.ndim != 1 or p.size not in (2, 3):
            raise ValueError("data covector needs matching 2- or 3-vectors")
        if not p[-1] > 0:
            raise ValueError("radius coordinate must be positive")
        if not np.linalg.norm(xi) > 0:
            raise ValueError("direction must be nonzero")
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "xi", xi)

    @property
    def radius(self) -> float:
        return float(self.point[-1])

    def detector(self) -> np.ndarray:
        return self.point[:-1]


@dataclass(frozen=True)
class RelationTag:
    """Identifier of a canonical relation; index is the endpoint sign,
    corner index 1..4, or edge index 5..8 where applicable."""

    kind: str
    index: int | None = None

    KINDS = ("diagonal", "endpoint", "vertex", "edge",
             "data_graph", "data_boundary")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown relation kind {self.kind!r}")
        if self.kind == "endpoint" and self.index not in (1, -1):
            raise ValueError("endpoint relation needs index +-1")
        if self.kind == "vertex" and self.index not in (1, 2, 3, 4):
            raise ValueError("vertex relation needs index 1..4")
        if self.kind == "edge" and self.index not in (5, 6, 7, 8):
            raise ValueError("edge relation needs index 5..8")


@dataclass
class RelationSample:
    """Sampled relation: a list of (left leg, right leg) covector pairs."""

    pairs: list
    tol: float = 1e-9

    def transpose(self) -> "RelationSample":
        return RelationSample([(b, a) for a, b in self.pairs], self.tol)

    def __len__(self) -> int:
        return len(self.pairs)


# ---------------------------------------------------------------------------
# membership


def _radial_check(point, xi, center, tol) -> tuple[bool, float]:
    """Is xi parallel (with consistent sign) to point - center?  Returns
    (ok, tau) with xi ~ tau (point - center)."""
    rvec = point - center
    r2 = float(np.dot(rvec, rvec))
    if r2 <= 0.0:
        return False, 0.0
    tau = float(np.dot(xi, rvec)) / r2
    resid = xi - tau * rvec
    scale = max(np.linalg.norm(xi), 1e-300)
    return bool(np.linalg.norm(resid) <= tol * scale and tau != 0.0), tau


def _rotation_pair_check(x_cov: Covector, y_cov: Covector, center,
                         tol: float) -> bool:
    rx = np.linalg.norm(x_cov.x - center)
    ry = np.linalg.norm(y_cov.x - center)
    if abs(rx - ry) > tol * max(1.0, rx):
        return False
    ok_x, tau_x = _radial_check(x_cov.x, x_cov.xi, center, tol)
    ok_y, tau_y = _radial_check(y_cov.x, y_cov.xi, center, tol)
    if not (ok_x and ok_y):
        return False
    scale = max(abs(tau_x), abs(tau_y))
    return abs(tau_x - tau_y) <= tol * scale


def relation_membership(tag: RelationTag, pair, aperture: Aperture,
                        tol: float = 1e-9) -> bool:
    """Does the covector pair satisfy the defining equalities of the
    relation within tol?"""
    a, b = pair
    if tag.kind == "diagonal":
        if not (isinstance(a, Covector) and isinstance(b, Covector)):
            return False
        if np.linalg.norm(a.x - b.x) > tol:
            return False
        if np.linalg.norm(a.xi - b.xi) > tol * max(1.0, np.linalg.norm(a.xi)):
            return False
        z = line_plane_intersection(a)
        if z is None:
            return False
        if aperture.dim == 2:
            return bool(abs(z[1]) <= 1.0 + tol)
        return bool(abs(z[1]) <= aperture.a + tol
                    and abs(z[2]) <= aperture.b + tol)

    if tag.kind == "endpoint":
        center = aperture.endpoint(tag.index)
        return _rotation_pair_check(a, b, center, tol)

    if tag.kind == "vertex":
        center = aperture.corner(tag.index)
        return _rotation_pair_check(a, b, center, tol)

    if tag.kind == "edge":
        axis, value = aperture.edge_axis(tag.index)
        run = 3 - axis
        half = aperture.edge_halfwidth(tag.index)
        if abs(a.x[run] - b.x[run]) > tol * max(1.0, abs(a.x[run])):
            return False
        # the shared aperture point is pinned by the first leg's line
        if a.xi[0] == 0.0:
            return False
        z = np.zeros(3)
        z[axis] = value
        z[run] = a.x[run] - a.x[0] * a.xi[run] / a.xi[0]
        if abs(z[run]) > half + tol:
            return False
        return _rotation_pair_check(a, b, z, tol)

    if tag.kind == "data_graph":
        return _data_graph_check(a, b, tol)

    if tag.kind == "data_boundary":
        return _data_boundary_check(a, b, aperture, tol)

    raise AssertionError(tag.kind)


def _image_leg_tau(dcov: DataCovector, icov: Covector, tol: float):
    """Common geometry of the data relations: image covector radial from
    the detector point, sphere radius matching.  Returns tau or None."""
    z = np.concatenate([[0.0], dcov.detector()])
    r = dcov.radius
    if abs(np.linalg.norm(icov.x - z) - r) > tol * max(1.0, r):
        return None
    ok, tau = _radial_check(icov.x, icov.xi, z, tol)
    return tau if ok else None


def _data_graph_check(dcov, icov, tol: float) -> bool:
    if not (isinstance(dcov, DataCovector) and isinstance(icov, Covector)):
        return False
    tau = _image_leg_tau(dcov, icov, tol)
    if tau is None:
        return False
    z = np.concatenate([[0.0], dcov.detector()])
    expect = np.concatenate([tau * (dcov.detector() - icov.x[1:]),
                             [-tau * dcov.radius]])
    scale = max(np.linalg.norm(expect), np.linalg.norm(dcov.xi), 1e-300)
    return bool(np.linalg.norm(dcov.xi - expect) <= tol * scale)


def _data_boundary_check(dcov, icov, aperture: Aperture, tol: float) -> bool:
    if not (isinstance(dcov, DataCovector) and isinstance(icov, Covector)):
        return False
    tau = _image_leg_tau(dcov, icov, tol)
    if tau is None:
        return False
    zdet = dcov.detector()
    scale = max(np.linalg.norm(dcov.xi), 1e-300)
    if abs(dcov.xi[-1] + tau * dcov.radius) > tol * scale:
        return False
    if aperture.dim == 2:
        return bool(abs(abs(zdet[0]) - 1.0) <= tol)
    on2 = abs(abs(zdet[0]) - aperture.a) <= tol
    on3 = abs(abs(zdet[1]) - aperture.b) <= tol
    inside2 = abs(zdet[0]) <= aperture.a + tol
    inside3 = abs(zdet[1]) <= aperture.b + tol
    if on2 and on3:
        return True                      # corner: in-plane frequency free
    if on3 and inside2:
        # edge along z2: the along-edge frequency component is pinned
        expect = tau * (zdet[0] - icov.x[1])
        return bool(abs(dcov.xi[0] - expect) <= tol * scale)
    if on2 and inside3:
        expect = tau * (zdet[1] - icov.x[2])
        return bool(abs(dcov.xi[1] - expect) <= tol * scale)
    return False


# ---------------------------------------------------------------------------
# sampled composition


def _leg_key(leg) -> np.ndarray:
    if isinstance(leg, Covector):
        return np.concatenate([leg.x, leg.unit()])
    return np.concatenate([leg.point, leg.xi / np.linalg.norm(leg.xi)])


def compose_sampled(left: RelationSample, right: RelationSample,
                    tol: float = 1e-9) -> RelationSample:
    """Compose sampled relations: for every left pair (a, b) and right pair
    (b', c) with b matching b' within tol (position and unit direction),
    emit (a, c).  Empty output is legitimate."""
    if not left.pairs or not right.pairs:
        return RelationSample([], tol)
    left_keys = np.stack([_leg_key(b) for _, b in left.pairs])
    right_keys = np.stack([_leg_key(b) for b, _ in right.pairs])
    if left_keys.shape[1] != right_keys.shape[1]:
        raise ValueError("intermediate spaces of the samples do not match")
    tree = cKDTree(right_keys)
    matches = tree.query_ball_point(left_keys, r=np.sqrt(2.0) * tol)
    out = []
    for i, hits in enumerate(matches):
        a = left.pairs[i][0]
        for j in hits:
            out.append((a, right.pairs[j][1]))
    return RelationSample(out, tol)


# ---------------------------------------------------------------------------
# samplers


def sample_data_graph(aperture: Aperture, n: int, rng,
                      radius_range=(0.5, 3.0), interior: bool = True,
                      margin: float = 0.05) -> RelationSample:
    """Random data_graph pairs with the detector point inside the aperture
    (interior=True keeps a margin from the boundary strata)."""
    pairs = []
    for _ in range(n):
        zdet = _random_detector(aperture, rng, margin if interior else 0.0)
        r = rng.uniform(*radius_range)
        tau = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
        pairs.append(_graph_pair(aperture, zdet, r, tau,
                                 _random_upper_unit(aperture.dim, rng)))
    return RelationSample(pairs)


def _random_detector(aperture: Aperture, rng, margin: float) -> np.ndarray:
    if aperture.dim == 2:
        return np.array([rng.uniform(-1.0 + margin, 1.0 - margin)])
    return np.array([rng.uniform(-aperture.a + margin, aperture.a - margin),
                     rng.uniform(-aperture.b + margin, aperture.b - margin)])


def _random_upper_unit(dim: int, rng) -> np.ndarray:
    while True:
        v = rng.normal(size=dim)
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            continue
        v /= norm
        if v[0] > 0.05:
            return v


def _graph_pair(aperture: Aperture, zdet, r, tau, omega):
    """Build one data_graph pair: image point x = z + r*omega (omega in the
    open upper half space) with its radial covector, and the matching data
    covector."""
    z = np.concatenate([[0.0], zdet])
    x = z + r * omega
    icov = Covector(x, tau * (x - z))
    dxi = np.concatenate([tau * (zdet - x[1:]), [-tau * r]])
    dcov = DataCovector(np.concatenate([zdet, [r]]), dxi)
    return (dcov, icov)


def coordinated_graph_legs(aperture: Aperture, n: int, rng,
                           radius_range=(0.5, 3.0)):
    """Left and right data_graph samples sharing identical data covectors
    (same z, r, tau, same image point), for the graph-transpose-graph
    composition: the only matching intermediates force identical legs, so
    the composition must land on the visible diagonal."""
    left, right = [], []
    for _ in range(n):
        zdet = _random_detector(aperture, rng, 0.05)
        r = rng.uniform(*radius_range)
        tau = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
        omega = _random_upper_unit(aperture.dim, rng)
        pair = _graph_pair(aperture, zdet, r, tau, omega)
        left.append(pair)
        right.append(pair)
    return RelationSample(left), RelationSample(right)


def coordinated_boundary_legs(aperture: Aperture, n: int, rng, stratum: Zone,
                              radius_range=(0.5, 3.0)):
    """Left data_graph legs and right data_boundary legs with matching
    intermediates, generating rotation pairs about the given stratum.

    The right leg's free in-plane frequency component is chosen so the data
    covectors coincide; the image legs then sit at independent rotation
    angles, so the composition samples the stratum's rotation relation.
    """
    if not stratum.is_boundary:
        raise ValueError("need a boundary stratum zone")
    left, right = [], []
    for _ in range(n):
        r = rng.uniform(*radius_range)
        tau = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
        if stratum.kind is ZoneKind.BOUNDARY_2D:
            zdet = np.array([float(stratum.index)])
            omega_x = _random_upper_unit(2, rng)
            omega_y = _random_upper_unit(2, rng)
        elif stratum.kind is ZoneKind.CORNER_3D:
            zdet = aperture.corner(stratum.index)[1:]
            omega_x = _random_upper_unit(3, rng)
            omega_y = _random_upper_unit(3, rng)
        else:
            axis, value = aperture.edge_axis(stratum.index)
            run = 3 - axis
            half = aperture.edge_halfwidth(stratum.index)
            zdet = np.zeros(2)
            zdet[axis - 1] = value
            zdet[run - 1] = rng.uniform(-half * 0.9, half * 0.9)
            # rotation about the edge line: the along-edge direction
            # component is shared by both legs
            omega_x = _random_upper_unit(3, rng)
            ang = rng.uniform(-0.45 * np.pi, 0.45 * np.pi)
            perp = np.hypot(omega_x[0], omega_x[axis])
            omega_y = omega_x.copy()
            omega_y[0] = perp * np.cos(ang)
            omega_y[axis] = perp * np.sin(ang)
        z = np.concatenate([[0.0], zdet])
        x = z + r * omega_x
        y = z + r * omega_y
        icov_x = Covector(x, tau * (x - z))
        icov_y = Covector(y, tau * (y - z))
        dxi = np.concatenate([tau * (zdet - x[1:]), [-tau * r]])
        dcov = DataCovector(np.concatenate([zdet, [r]]), dxi)
        left.append((dcov, icov_x))
        right.append((dcov, icov_y))
    return RelationSample(left), RelationSample(right)


# ---------------------------------------------------------------------------
# strength predictions


POINT_ROTATION = "point"     # rank surplus 1: Sobolev shift m + (n-1)/2
LINE_ROTATION = "line"       # rank surplus 2: Sobolev shift m + 1/2


@dataclass(frozen=True)
class OrderPrediction:
    """Predicted fate of one input covector under the limited-aperture
    reconstruction.  ``sobolev_shift`` = kernel_order + (n - rank_surplus)/2;
    ``orders_smoother`` = -sobolev_shift for artifact verdicts."""

    covector: Covector
    zone: Zone
    cutoff_order: int | None
    verdict: str                      # reconstructed|artifact|smooth|undetermined
    kernel_order: float | None = None
    rotation_class: str | None = None     # point|line
    rank_surplus: int | None = None
    sobolev_shift: float | None = None
    orders_smoother: float | None = None
    symbol: float | None = None
    locus: list = field(default_factory=list)
    overlap_undetermined: bool = False


def sobolev_shift(kernel_order: float, dim: int, rank_surplus: int) -> float:
    """Mapping-order bookkeeping: H^s -> H^(s - kernel_order - (n-k)/2) for
    a relation whose projections have rank n + k; the shift recorded here
    is kernel_order + (n - k)/2 (negative of the smoothness gain)."""
    return kernel_order + (dim - rank_surplus) / 2.0


def predict_singularity_map(cov: Covector, spec: CutoffSpec,
                            aperture: Aperture, tol: float = 1e-9,
                            locus_samples: int = 64) -> OrderPrediction:
    """Verdict table: invisible covectors are wiped, visible ones are
    reconstructed with principal symbol equal to the cutoff value at the
    line-plane intersection, boundary-zone ones spawn rotation artifacts
    k (2D endpoints, 3D edges) or 2k (3D corners) orders smoother than the
    source, with the locus sampled by geometry.artifact_locus."""
    if spec.dim != cov.dim or aperture.dim != cov.dim:
        raise ValueError("covector, cutoff, and aperture dimensions differ")
    zone = classify_covector(cov, aperture, tol)
    dim = cov.dim

    if zone.kind is ZoneKind.INVISIBLE:
        return OrderPrediction(cov, zone, None, "smooth")

    z = line_plane_intersection(cov)

    if zone.kind is ZoneKind.VISIBLE:
        chi = float(spec.eval(z))
        return OrderPrediction(cov, zone, None, "reconstructed",
                               kernel_order=0.0, sobolev_shift=0.0,
                               orders_smoother=0.0, symbol=chi)

    if zone.kind is ZoneKind.BOUNDARY_2D:
        prof = spec.profile
        endpoint = float(zone.index)
        if prof.vanishes_identically_near(endpoint, tol):
            return OrderPrediction(cov, zone, None, "smooth")
        k = prof.k_hi if zone.index > 0 else prof.k_lo
        m = -k - 0.5
        shift = sobolev_shift(m, dim, 1)
        locus = artifact_locus(cov, zone, aperture, locus_samples)
        return OrderPrediction(cov, zone, k, "artifact", m, POINT_ROTATION, 1,
                               shift, -shift, locus=locus)

    if zone.kind is ZoneKind.CORNER_3D:
        corner = aperture.corner(zone.index)
        p2, p3 = spec.profile2, spec.profile3
        if (p2.vanishes_identically_near(corner[1], tol)
                or p3.vanishes_identically_near(corner[2], tol)):
            return OrderPrediction(cov, zone, None, "smooth")
        k2 = p2.k_hi if corner[1] > 0 else p2.k_lo
        k3 = p3.k_hi if corner[2] > 0 else p3.k_lo
        m = -(k2 + k3) - 1.0
        shift = sobolev_shift(m, dim, 1)
        locus = artifact_locus(cov, zone, aperture, locus_samples)
        return OrderPrediction(cov, zone, max(k2, k3), "artifact", m,
                               POINT_ROTATION, 1, shift, -shift, locus=locus,
                               overlap_undetermined=True)

    # edge zone: strength comes from the across-edge profile's endpoint
    # order; the along-edge profile only micro-localizes the support
    axis, value = aperture.edge_axis(zone.index)
    across = spec.profile3 if axis == 2 else spec.profile2
    along = spec.profile2 if axis == 2 else spec.profile3
    if along.vanishes_identically_near(z[3 - axis], tol):
        return OrderPrediction(cov, zone, None, "smooth")
    k = across.k_hi if value > 0 else across.k_lo
    m = -k - 0.5
    shift = sobolev_shift(m, dim, 2)
    locus = artifact_locus(cov, zone, aperture, locus_samples)
    return OrderPrediction(cov, zone, k, "artifact", m, LINE_ROTATION, 2,
                           shift, -shift, locus=locus)


def prediction_rows(pred: OrderPrediction) -> list[dict]:
    """Flatten a prediction into CSV-ready rows (one per locus sample, or a
    single row when there is no locus)."""
    base = {
        "x": " ".join(f"{v:.9g}" for v in pred.covector.x),
        "xi": " ".join(f"{v:.9g}" for v in pred.covector.xi),
        "zone": pred.zone.kind.value,
        "zone_index": "" if pred.zone.index is None else pred.zone.index,
        "cutoff_order": "" if pred.cutoff_order is None else pred.cutoff_order,
        "verdict": pred.verdict,
        "kernel_order": "" if pred.kernel_order is None else pred.kernel_order,
        "sobolev_shift": "" if pred.sobolev_shift is None else pred.sobolev_shift,
        "orders_smoother": ("" if pred.orders_smoother is None
                            else pred.orders_smoother),
        "symbol": "" if pred.symbol is None else f"{pred.symbol:.9g}",
        "overlap_undetermined": int(pred.overlap_undetermined),
    }
    if not pred.locus:
        row = dict(base)
        row["locus_x"] = ""
        row["locus_xi"] = ""
        return [row]
    rows = []
    for sample in pred.locus:
        row = dict(base)
        row["locus_x"] = " ".join(f"{v:.9g}" for v in sample.x)
        row["locus_xi"] = " ".join(f"{v:.9g}" for v in sample.xi)
        rows.append(row)
    return rows
