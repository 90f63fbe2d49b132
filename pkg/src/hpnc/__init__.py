"""Single-mode nonclassicality checked three ways: single-mode moments,
beam-splitter entanglement, and finite-N Dicke states via Holstein-Primakoff."""

from .beam_splitter import (BSParams, SchmidtResult, SearchConfig, TwoModeMixture,
                            TwoModeState, apply_bs, bs_route_mandel, embed_with_vacuum,
                            entanglement_potential, hz_two_mode_violation, schmidt_analysis,
                            verify_mode_transform)
from .criteria import (CriterionReport, first_order_violation, higher_order_violation,
                       mandel_violation, squeezing_violation)
from .dicke import (DickeState, SpinOperators, atomic_coherent_state, dicke_mandel_violation,
                    hp_embed, hz_schwinger_violation, optimal_spin_squeezing,
                    schwinger_identity_check, spin_matrices, spin_squeezing_xi2)
from .errors import *  # noqa: F401,F403
from .experiments import (RankRecord, SweepRecord, acs_fidelity_sweep, rank_equivalence,
                          sweep_hz_to_mandel, sweep_xi2_to_squeezing)
from .fock import (DensityOperator, SingleModeState, StateSpec, expectation_moment,
                   quadrature_variance, state_from_spec, tail_mass)

__version__ = "0.1.0"
