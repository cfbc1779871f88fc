"""Zero statistics of random Taylor series F(z) = sum_k xi_k a_k z^k.

Coefficient magnitudes are handled in the log domain throughout, counts
come from two independent routes (boundary winding and certified root
finding), and every truncation carries an explicit tail certificate.
"""

import os as _os

# Pin BLAS threading before numpy loads anywhere in the package: tiny
# matmuls gain nothing from threads, and worker processes must produce
# byte-identical reductions regardless of --jobs.
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    _os.environ.setdefault(_var, "1")
del _os, _var

from radezero import errors
from radezero.profile import (
    CoefficientProfile,
    RadialFrame,
    explicit_profile,
    explicit_from_values,
    factorial_profile,
    log_sigma,
    s_of_r,
    central_index,
    central_group,
    normalize,
    radial_frame,
)

__version__ = "0.1.0"
