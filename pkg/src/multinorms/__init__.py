"""Multi-norms on finite discrete spaces, amenability diagnostics, and
group-module verification."""

from ._optim import DEFAULT_CONFIG, OptConfig
from .spaces import (DiscreteSpace, Exponent, MultiVector, Vector, conjugate,
                     lp_norm, multivector_from_json, pairing, scale_by)
from .weaksum import MuResult, mu, mu_pointwise_sup, mu_upper
from .multinorm import (Decomposition, DualTuple, NormResult, Partition,
                        axioms_check, dual_multinorm_upper, duality_check,
                        extension_norm, max_multinorm, ordering_check,
                        partition_sup_q, standard_pq, weak_dual_value, weak_pq)

__version__ = "0.1.0"
