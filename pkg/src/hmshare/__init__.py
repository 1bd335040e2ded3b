"""Time-shared broadcast optimisation with 2-layer hierarchical modulation.

The package computes the best common time-averaged spectral efficiency a
broadcast beam can offer a receiver population when plain and hierarchical
modulations may be time shared, by solving a standard-form linear program
over the achievable rate vectors.  It also ships the channel model,
capacity-based decoding thresholds, two baseline schemes and a simulation
harness for gain studies.
"""

from .capacity import MiEstimate, ModCod, ModcodSpec, calibrated_margin, \
    decoding_threshold, load_modcod_table, stream_mutual_information
from .channel import AntennaModel, Receiver, WeatherCdf, bessel_j1, \
    edge_angle, pattern_attenuation_db, sample_receivers
from .constellation import Constellation, ConstellationParams, \
    build_constellation, stream_bits, validate_params
from .baselines import GroupSchedule, best_pair_rate, equalize, pair_scheme, \
    reference_vcm
from .lp import LpProblem, LpSolution, Schedule, assemble, optimal_schedule, \
    solve
from .ratevectors import EnumerationLimits, RateVector, best_single_rate, \
    enumerate_all, pair_vectors, pareto_prune
from .sim import Scenario, TrialResult, run_trial, summarize, sweep, \
    unavailability, write_csv

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
