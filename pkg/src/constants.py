"""Shared numerical constants."""

NORMALIZATION_TOLERANCE = 1e-12
DEFAULT_TOLERANCE = 1e-7
INFINITY_THRESHOLD = 1e-12

POLISH_MAX_ITERATIONS = 50
POLISH_TOLERANCE = 1e-13
MULTIPLE_ROOT_RADIUS = 0.25
MULTIPLE_ROOT_MIN_RADIUS = 1e-9
MULTIPLE_ROOT_RESIDUAL = 1e-9

ANTICOHERENCE_THRESHOLD = 1e-9
MEAN_SPIN_THRESHOLD = 1e-10

RYSER_MAX_SIZE = 20
RYSER_CHUNK_BITS = 14
LOG_FACTORIAL_CUTOFF = 18

MATCHING_RADIUS = 0.2
CHART_SWITCH_RADIUS = 10.0
CLOSED_LOOP_FIDELITY = 1 - 1e-8
CLOSED_PATH_TOLERANCE = 1e-8
STAR_CLOSURE_RADIUS = 1e-3
STAR_AGREEMENT_TOLERANCE = 1e-6
POLE_CLEARANCE = 1e-6

RICCATI_RTOL = 1e-10
RICCATI_ATOL = 1e-12

BASIS_RANK_TOLERANCE = 1e-10
