"""Multi-photon entangled-pair QKD rate calculator.

Models type-II parametric down-conversion states on a truncated four-mode
Fock space, photon loss via beam-splitter POVMs, a calibrated
source-substitution eavesdropping attack, and the resulting secrecy
capacity of the standard (2-photon) and multi-photon key protocols.
"""

from .adversary import (CalibrationError, EveKind, EveRecord, EveStrategy,
                        calibrate_gamma, eve_component_states, eve_ensemble,
                        eve_error_rate, eve_information_bound,
                        natural_error_profile, tripartite_distribution,
                        wrong_basis_error_weight)
from .fock import (Ensemble, FockSpaceError, PureState, ZeroNormError,
                   fidelity, inner_product, make_state, normalize)
from .infotheory import (JointDistribution, entropy, mutual_information,
                         secrecy_capacity_bound)
from .measurement import (LossModel, OutcomeDistribution,
                          coincidence_probability, conditional_error_rate,
                          outcome_distribution, povm_weight)
from .polarization import Basis, Side, measurement_frame, rotate
from .protocol import (ErrorEstimate, Outcome, Scenario, SessionConfig,
                       SessionReport, error_estimate, extract_key_letter,
                       pulse_uniforms, run_session, wilson_interval)
from .rates import (Protocol, RateReport, default_cutoff, evaluate_rates,
                    find_crossover, optimize_tau, sweep)
from .source import (PdcParams, SqueezeParams, pdc_state, sector_probability,
                     singlet_state, squeezed_pair_state, truncation_deficit)

__version__ = "0.1.0"
