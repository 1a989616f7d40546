"""awlab: a numerical workbench for free Araki-Woods algebras.

Submodules
----------
rep            orthogonal representations of R, spectral data, classification
fock           truncated full Fock spaces, creation operators, vacuum moments
free           NC probability spaces, free products, freeness checks
laws           reference law moments
tla            polar decomposition of the generalized circular element
modular        modular group, analytic continuation, KMS checks
barnett        constants and check of the 14-epsilon inequality
matrix_models  GUE and Ginibre Monte Carlo
cli            the ``awlab`` command
"""

from .words import WordExpr, format_word, adjoint_word
from .rep import (RepSpec, RepSpecError, SpectralData, TypeLabel, classify, direct_sum,
                  embed, generator_spectrum, involution_apply, parse_rep_spec)
from .fock import (FockBudgetError, FockOperator, FockSpace, build_fock, creation,
                   empirical_spectrum, evaluate_word, field, field_pair_identity_check,
                   generalized_circular, second_quantize, semicircular_field,
                   vacuum_expectation)
from .free import (FockNCSpace, FreeProductSpace, FreenessReport, MatrixSpace, NCSpace,
                   check_freeness, free_product_moment, m2_space, omega_lambda_space)
from .laws import catalan, law_moments
from .tla import TlaReport, polar_tla
from .modular import (FieldPoly, ModularFlow, almost_eigen, analytic_field, kms_check,
                      modular_apply, periodicity_defect)
from .barnett import (BarnettConstants, BarnettSetup, barnett_check, c_const, ef_consts,
                      two_norm)
from .matrix_models import (EnsembleSpec, asymptotic_freeness_check, mc_moments,
                            sample_ginibre, sample_gue)

__version__ = "0.1.0"
