"""Mean-vector tests for high-dimensional M-dependent Gaussian time series."""

from .autocov import gram, sample_mean, trace_autocov
from .dataio import ObservationMatrix, load_matrix, save_matrix, save_results
from .debias import b_vector, debias_system, theta_matrix, tr_omega_hat
from .errors import (
    ConfigError,
    DegenerateVarianceError,
    DimensionError,
    DomainError,
    EmptyIndexSetError,
    MdepError,
    NotPositiveDefiniteError,
    ParseError,
    SingularSystemError,
)
from .kernels import BACKEND
from .meantests import (
    TestResult,
    TwoSampleInput,
    m_statistic,
    test_bs,
    test_one_sample,
    test_two_sample,
    theoretical_power,
)
from .variance import cross_trace_table, trace_product_table, variance_estimate, xi_weights

__version__ = "0.1.0"
