"""Dirichlet Laplacian spectra on planar, box and half-plane domains, and
numerical checks of universal eigenvalue gap inequalities.

Setting ``SGW_THREADS`` before the first import caps the BLAS thread pools.
"""

import os

_threads = os.environ.get("SGW_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

from .errors import *  # noqa: E402,F401,F403
from .geometry import (DomainSpec, Grid, rasterize, volume, rectangle, square, box,  # noqa: E402
                       cube, disk, l_shape, polygon, hyperbolic_rect)
from .discretize import (SparseOperator, GeneralizedProblem, assemble_euclidean,  # noqa: E402
                         assemble_hyperbolic)
from .eigensolve import Spectrum, smallest_eigenpairs, cluster_multiplicities  # noqa: E402
from .oracles import (OracleSpectrum, rectangle_spectrum, box_spectrum, disk_spectrum,  # noqa: E402
                      bessel_j, bessel_zero, weyl_estimate, ppw_ratio_bound)
from .bounds import BoundConfig, BoundCheck  # noqa: E402
from .spectrum_file import read_spectrum, write_spectrum  # noqa: E402

__version__ = "0.1.0"
