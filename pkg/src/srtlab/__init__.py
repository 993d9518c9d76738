"""srtlab: a numerical laboratory for spherical-mean reconstruction from a
bounded planar aperture.

The package implements the forward spherical-means transform, the exact
filtered-backprojection inverse for plane-centered data, its restriction to
a bounded aperture with a finite-order cutoff, and the measurement tooling
(oscillatory-integral decay fits, wavefront relation calculus, image-space
regularity probes) used to verify where limited-aperture artifacts appear
and how strong they are.
"""

__version__ = "0.1.0"

from . import analysis, asymptotics, cutoff, filtering, geometry, grids
from . import kernels, reconstruct, transform, wavefront

__all__ = [
    "analysis", "asymptotics", "cutoff", "filtering", "geometry", "grids",
    "kernels", "reconstruct", "transform", "wavefront", "__version__",
]
