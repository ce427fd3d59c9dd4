"""Sum-capacity certificates for K-user Gaussian interference channels
under simple Han-Kobayashi schemes, plus the random-topology study."""

__version__ = "0.1.0"

from .classify import certify_channel, classify_channel, classify_scheme
from .core import (CapacityVerdict, RhoWitness, ShkScheme, StandardGic,
                   enumerate_schemes, interference_noise_power, mac_group_rate,
                   shk_rate_point, standardize)
from .search import SearchConfig
from .special import (PartialTopology, cascade_classify, cyclic_classify,
                      many_to_one_classify, two_user_classify)
from .theorem1 import (Theorem1Report, check_decoding_achievability,
                       check_genie_feasibility, classify_theorem1)
from .theorem2 import (SumRateBound, enumerate_cover_bounds, lp_sum_rate_oracle,
                       max_achievable_sum_rate)
from .theorem3 import (Theorem3Config, check_theorem3, classify_theorem2_3,
                       fixed_rho_k, theorem3_upper_bound)

__all__ = [
    "CapacityVerdict", "PartialTopology", "RhoWitness", "SearchConfig",
    "ShkScheme", "StandardGic", "SumRateBound", "Theorem1Report",
    "Theorem3Config", "cascade_classify", "certify_channel",
    "check_decoding_achievability", "check_genie_feasibility",
    "check_theorem3", "classify_channel", "classify_scheme",
    "classify_theorem1", "classify_theorem2_3", "cyclic_classify",
    "enumerate_cover_bounds", "enumerate_schemes", "fixed_rho_k",
    "interference_noise_power", "lp_sum_rate_oracle", "mac_group_rate",
    "many_to_one_classify", "max_achievable_sum_rate", "shk_rate_point",
    "standardize", "theorem3_upper_bound", "two_user_classify",
]
