"""Anderson localization of anyon pairs on a disordered torus lattice.

Pipeline: build disordered walker Hamiltonians (hamiltonian), extract
localization lengths from their eigenstates (spectra), evolve pairs in
time and test the displacement bound (dynamics), and convert localization
lengths into memory-stability estimates through a parity-decoder threshold
(decoder).  The cli module wires these into seeded, reproducible sweeps.
"""

from .lattice import (PairBasis, TorusLattice, max_pair_distance,
                      pair_distance, pair_distances_from)
from .hamiltonian import (DisorderRealization, WalkerHamiltonian,
                          build_single, build_two_walker, sample_disorder)
from .spectra import (EigenSystem, LocalizationReport, StateFit,
                      aggregate_localization, diagonalize,
                      disorder_averaged_length, fit_localization_length,
                      hamiltonian_localization_length, localization_report,
                      localization_samples, locate_peak)
from .dynamics import (BoundReport, DisplacementProfile, check_bound,
                       displacement_profile, escape_probability,
                       evolve_amplitudes, evolve_probability)
from .decoder import (CoarseSyndrome, CriticalDensityCurve, EdgeFlips,
                      LambdaCResult, SquarePartition, ThresholdEstimate,
                      critical_density_curve, crossings_from_curves,
                      estimate_logical_rate, estimate_threshold,
                      logical_failure, match_syndrome, minimum_weight_pairs,
                      sample_edge_flips, solve_lambda_c, syndrome_from_flips)

__version__ = "0.1.0"
