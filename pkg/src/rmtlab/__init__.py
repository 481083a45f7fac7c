"""rmtlab: matrix delta-function calculus and random-matrix verification."""

__version__ = "0.1.0"

from .delta1d import (  # noqa: F401
    EPS_GRID,
    Mollifier,
    PolynomialG,
    TestFunction,
    composition_roots,
    convolution_shift,
    derivative_pairing,
    dirichlet_delta,
    pv_sinc,
    sampling_residual,
    scaling_check,
)
from .ensembles import (  # noqa: F401
    DEFAULT_SEED,
    Ginibre,
    HaarUnitary,
    Induced,
    RngStream,
    SumWishart,
    Wishart,
    logdensity_eigs,
    logdensity_wishart_matrix,
    sample,
    sample_batch,
    sample_ginibre,
    sample_haar_unitary,
    sample_induced_state,
    sample_sum_wishart,
    sample_wishart,
)
from .jacobians import (  # noqa: F401
    delta_scale_complex_vector,
    delta_scale_congruence,
    delta_scale_rect,
    delta_scale_vector,
    fourier_constant,
    fourier_constant_expected,
)
from .linalg import (  # noqa: F401
    coordinate_basis,
    eig_sorted,
    kron,
    unvec,
    vandermonde,
    vec,
)
from .specialfn import (  # noqa: F401
    IdentityCheck,
    MCEstimate,
    gamma_p,
    hciz_closed_form,
    hciz_monte_carlo,
    kummer_residual,
    matrix_1f1,
    sum_wishart_symmetry_residual,
)
from .statcheck import (  # noqa: F401
    Histogram,
    KSResult,
    ks_test,
    marginal_from_joint_m2,
    moment_report,
    verify_suite,
)
