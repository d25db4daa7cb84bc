"""Weighted (residual) varentropy toolkit.

Quadrature-backed weighted entropies and varentropies, their residual
versions, transformation identities, coherent-system and proportional
hazard models, and a kernel estimator with Monte Carlo and bootstrap
harnesses.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, QuadratureResult, integrate  # noqa: E402
from .distributions import (  # noqa: E402
    BurrIII, Distribution, Exponential, LogisticExponential, LogUniform, Lomax, ParetoI,
    Power, Uniform, Weibull, evaluate, parse_dist,
)
from .measures import (  # noqa: E402
    IDENTITY, UNIT, DiscreteModel, WeightFunction, closed_form_wve, discrete_varentropy,
    discrete_weighted_varentropy, parse_weight, shannon_entropy, varentropy, varextropy,
    weighted_entropy, weighted_varentropy, wve_upper_bound,
)
from .residual import (  # noqa: E402
    EtaFunction, closed_form_wrve, rve, wrse, wrve, wrve_derivative, wrve_lower_bound,
    wrve_upper_bound,
)
from .transforms import (  # noqa: E402
    MonotoneMap, TransformedDistribution, parse_map, wrve_affine, wrve_monotone, wve_affine,
    wve_location, wve_monotone, wve_scale,
)
from .systems import (  # noqa: E402
    DistortedDistribution, DistortionFunction, closed_form_parallel2_power, distortion_k_of_n,
    parse_structure, wve_coherent, wve_coherent_bounds, wve_comparison_condition, wve_system_direct,
)
from .phr import (  # noqa: E402
    PHRModel, gamma_fn, phr_exponential_wrve, series_exponential_wrve, wrse_phr, wrve_phr,
)
from .estimation import (  # noqa: E402
    BandwidthRule, KernelEstimate, bootstrap_study, kde_pdf, kde_sf, monte_carlo_study,
    silverman_bandwidth, wrse_estimate, wrve_estimate,
)
from .datasets import COVID, NANO, Dataset, load_dataset  # noqa: E402
