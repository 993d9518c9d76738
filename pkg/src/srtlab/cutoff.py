"""Aperture cutoff windows with an exact, finite vanishing order.

A profile h lives on an interval [c, d], is identically zero outside it,
and vanishes to a prescribed order k at each endpoint: h^(l) = 0 for
l < k and h^(k) != 0 there.  Products of these windows give the cutoff
applied to data on a rectangular aperture.

Profiles are piecewise polynomials stored in the Bernstein basis: the
incomplete-beta ramps used here have exact 0/1 Bernstein coefficients,
endpoint vanishing of order k is encoded by k exactly-zero leading or
trailing coefficients, and evaluation is numerically stable, so vanishing
orders and partition identities hold to machine precision rather than to
polynomial-cancellation noise.

Families:

* ``polynomial`` -- ((d - tau)(tau - c))^k, normalized to 1 at the
  interval midpoint.  The canonical choice for order studies.
* ``plateau``   -- identically 1 on the middle (1 - rho) fraction with a
  ramp of vanishing order exactly k at the ends; the ramp joins the
  plateau with k+6 continuous derivatives so the junctions stay invisible
  to decay measurements.
* ``onesided+`` / ``onesided-`` -- the polynomial profile multiplied by a
  smooth partition step so that it vanishes identically near the lower
  (resp. upper) endpoint.  The pair sums pointwise to the two-sided
  polynomial profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BPoly

FAMILIES = ("polynomial", "plateau", "onesided+", "onesided-")

# extra smoothness of interior junctions relative to the endpoint order
_JUNCTION_MARGIN = 6


# -- Bernstein coefficient helpers ------------------------------------------


def _bernstein_product(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Coefficients of the product of two Bernstein polynomials."""
    m, n = f.size - 1, g.size - 1
    out = np.zeros(m + n + 1)
    for i in range(m + n + 1):
        acc = 0.0
        for j in range(max(0, i - n), min(m, i) + 1):
            acc += (math.comb(m, j) * math.comb(n, i - j)
                    / math.comb(m + n, i)) * f[j] * g[i - j]
        out[i] = acc
    return out


def _elevate(c: np.ndarray, degree: int) -> np.ndarray:
    """Degree-elevate Bernstein coefficients to the target degree."""
    c = np.asarray(c, dtype=float)
    while c.size - 1 < degree:
        n = c.size - 1
        out = np.empty(n + 2)
        out[0] = c[0]
        out[-1] = c[-1]
        for i in range(1, n + 1):
            out[i] = (i * c[i - 1] + (n + 1 - i) * c[i]) / (n + 1)
        c = out
    return c


def _linear_power(b0: float, b1: float, k: int) -> np.ndarray:
    """Bernstein coefficients of (b0 (1-u) + b1 u)^k; exact zeros survive."""
    out = np.array([1.0])
    lin = np.array([b0, b1])
    for _ in range(k):
        out = _bernstein_product(out, lin)
    return out


def _base_piece(k_lo: int, k_hi: int, interval, piece, norm: float) -> np.ndarray:
    """Bernstein coefficients (on the piece, parametrized to [0, 1]) of
    (tau - c)^k_lo (d - tau)^k_hi / norm restricted to the piece.  Leading
    and trailing zeros are exact when the piece touches c or d."""
    c, d = interval
    left, right = piece
    f = _linear_power(left - c, right - c, k_lo)
    g = _linear_power(d - left, d - right, k_hi)
    return _bernstein_product(f, g) / norm


def _ramp_coeffs(k: int, q: int) -> np.ndarray:
    """Rising ramp with vanishing order k at 0 and contact order q+1 at 1:
    the regularized incomplete beta I_u(k, q+1), whose Bernstein
    coefficients are exactly k zeros followed by q+1 ones."""
    return np.array([0.0] * k + [1.0] * (q + 1))


def _build_bpoly(pieces: list[tuple[float, float, np.ndarray]]) -> BPoly:
    breaks = [pieces[0][0]] + [p[1] for p in pieces]
    degree = max(p[2].size - 1 for p in pieces)
    coef = np.zeros((degree + 1, len(pieces)))
    for i, (_l, _r, c) in enumerate(pieces):
        coef[:, i] = _elevate(c, degree)
    return BPoly(coef, np.asarray(breaks, dtype=float), extrapolate=False)


# -- profiles ----------------------------------------------------------------


@dataclass(frozen=True)
class CutoffProfile:
    """One-dimensional cutoff window with exact endpoint vanishing orders.

    ``k_lo`` / ``k_hi`` are the vanishing orders at the lower / upper
    endpoint; the symmetric constructors set both to the same ``k``.  For
    the one-sided families the profile vanishes identically near the dead
    endpoint and k applies to the live one.
    """

    family: str
    k_lo: int
    k_hi: int
    interval: tuple[float, float]
    plateau_frac: float | None = None
    _bp: BPoly = field(repr=False, compare=False, default=None)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def polynomial(k: int, interval: tuple[float, float] = (-1.0, 1.0),
                   k_hi: int | None = None) -> "CutoffProfile":
        k_hi = k if k_hi is None else k_hi
        _check_orders(k, k_hi, interval)
        c, d = interval
        half = (d - c) / 2.0
        coeffs = _base_piece(k, k_hi, interval, interval, half ** (k + k_hi))
        return CutoffProfile("polynomial", k, k_hi, (c, d),
                             _bp=_build_bpoly([(c, d, coeffs)]))

    @staticmethod
    def plateau(k: int, rho: float = 0.5,
                interval: tuple[float, float] = (-1.0, 1.0),
                k_hi: int | None = None) -> "CutoffProfile":
        k_hi = k if k_hi is None else k_hi
        _check_orders(k, k_hi, interval)
        if not 0.0 < rho < 1.0:
            raise ValueError("plateau fraction must lie in (0, 1)")
        c, d = interval
        if k == 0 and k_hi == 0:
            return CutoffProfile("plateau", 0, 0, (c, d), rho,
                                 _bp=_build_bpoly([(c, d, np.array([1.0]))]))
        ell = rho * (d - c) / 2.0
        one = np.array([1.0])
        pieces = [
            (c, c + ell,
             _ramp_coeffs(k, k + _JUNCTION_MARGIN) if k > 0 else one),
            (c + ell, d - ell, one),
            (d - ell, d,
             _ramp_coeffs(k_hi, k_hi + _JUNCTION_MARGIN)[::-1].copy()
             if k_hi > 0 else one),
        ]
        return CutoffProfile("plateau", k, k_hi, (c, d), rho,
                             _bp=_build_bpoly(pieces))

    @staticmethod
    def one_sided(sign: str, k: int,
                  interval: tuple[float, float] = (-1.0, 1.0),
                  transition: tuple[float, float] = (0.4, 0.6)) -> "CutoffProfile":
        """Split of the two-sided polynomial profile: '+' keeps the upper
        endpoint and vanishes identically near the lower one, '-' the
        reverse.  one_sided('+', k) + one_sided('-', k) equals
        polynomial(k) pointwise to machine precision."""
        if sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        _check_orders(k, k, interval)
        c, d = interval
        half = (d - c) / 2.0
        norm = half ** (2 * k)
        lo, hi = transition
        if not 0.0 < lo < hi < 1.0:
            raise ValueError("transition fractions must satisfy 0 < lo < hi < 1")
        m1, m2 = c + lo * (d - c), c + hi * (d - c)
        p = k + _JUNCTION_MARGIN + 1
        step = np.array([0.0] * p + [1.0] * p)     # smooth 0 -> 1 on [m1, m2]
        base_mid = _base_piece(k, k, interval, (m1, m2), norm)
        rising = _bernstein_product(base_mid, step)
        falling = _elevate(base_mid, rising.size - 1) - rising
        zero = np.array([0.0])
        if sign == "+":
            pieces = [(c, m1, zero),
                      (m1, m2, rising),
                      (m2, d, _base_piece(k, k, interval, (m2, d), norm))]
            fam = "onesided+"
        else:
            pieces = [(c, m1, _base_piece(k, k, interval, (c, m1), norm)),
                      (m1, m2, falling),
                      (m2, d, zero)]
            fam = "onesided-"
        return CutoffProfile(fam, k, k, (c, d), _bp=_build_bpoly(pieces))

    # -- queries --------------------------------------------------------------

    @property
    def k(self) -> int:
        """Vanishing order at the live endpoint(s)."""
        return max(self.k_lo, self.k_hi)

    def eval(self, tau, deriv: int = 0):
        """h^(deriv)(tau); zero outside the support interval.  At the
        endpoints the one-sided (interior) derivative is returned."""
        if deriv < 0:
            raise ValueError("derivative order must be nonnegative")
        bp = self._bp if deriv == 0 else self._bp.derivative(deriv)
        tau = np.asarray(tau, dtype=float)
        out = bp(tau)
        out = np.where(np.isnan(out), 0.0, out)
        return out if out.ndim else float(out)

    def __call__(self, tau, deriv: int = 0):
        return self.eval(tau, deriv)

    def support_pieces(self) -> list[tuple[float, float]]:
        """Sub-intervals on which the profile is not identically zero."""
        bp = self._bp
        out = []
        for i in range(bp.c.shape[1]):
            if np.any(bp.c[:, i] != 0.0):
                out.append((float(bp.x[i]), float(bp.x[i + 1])))
        return out

    def breakpoints(self) -> np.ndarray:
        return np.array(self._bp.x, dtype=float)

    def vanishes_identically_near(self, tau: float, delta: float) -> bool:
        """True if the profile is the zero function on (tau-delta, tau+delta)."""
        lo, hi = tau - delta, tau + delta
        for a, b in self.support_pieces():
            if b > lo and a < hi:
                return False
        return True


def _check_orders(k_lo: int, k_hi: int, interval) -> None:
    if k_lo < 0 or k_hi < 0:
        raise ValueError("vanishing order must be nonnegative")
    c, d = interval
    if not d > c:
        raise ValueError("interval must have positive length")


def eval_cutoff(profile: CutoffProfile, tau, deriv_order: int = 0):
    """Evaluate a profile or one of its derivatives (module-level alias)."""
    return profile.eval(tau, deriv_order)


@dataclass(frozen=True)
class CutoffSpec:
    """Cutoff on the aperture plane: one profile for a 2D segment aperture,
    a product of two profiles for a 3D rectangular aperture."""

    dim: int
    profile: CutoffProfile | None = None          # 2D
    profile2: CutoffProfile | None = None         # 3D, z2 axis
    profile3: CutoffProfile | None = None         # 3D, z3 axis

    def __post_init__(self):
        if self.dim == 2:
            if self.profile is None:
                raise ValueError("2D cutoff needs one profile")
        elif self.dim == 3:
            if self.profile2 is None or self.profile3 is None:
                raise ValueError("3D cutoff needs profiles for both axes")
        else:
            raise ValueError("dim must be 2 or 3")

    @staticmethod
    def for_segment(profile: CutoffProfile) -> "CutoffSpec":
        return CutoffSpec(2, profile=profile)

    @staticmethod
    def for_rectangle(profile2: CutoffProfile, profile3: CutoffProfile) -> "CutoffSpec":
        return CutoffSpec(3, profile2=profile2, profile3=profile3)

    def eval(self, z):
        """Cutoff value at points z on the plane {x1 = 0}.

        z has shape (..., dim); the leading coordinate must vanish.
        Zero outside the aperture."""
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.dim:
            raise ValueError(f"expected points with {self.dim} coordinates")
        if np.any(np.abs(z[..., 0]) > 1e-9):
            raise ValueError("cutoff is defined on the plane x1 = 0")
        if self.dim == 2:
            return self.profile.eval(z[..., 1])
        return self.profile2.eval(z[..., 1]) * self.profile3.eval(z[..., 2])

    def eval_detector(self, zdet):
        """Same, from detector coordinates (the plane coordinates without
        the leading zero): scalar z2 for 2D, (z2, z3) for 3D."""
        zdet = np.asarray(zdet, dtype=float)
        if self.dim == 2:
            return self.profile.eval(zdet)
        return self.profile2.eval(zdet[..., 0]) * self.profile3.eval(zdet[..., 1])


def eval_plane_cutoff(spec: CutoffSpec, z):
    """Module-level alias for CutoffSpec.eval."""
    return spec.eval(z)
