"""Tunable constants."""

# Calibration constant for the closed-neighborhood cap of star-partition parts:
# |N[V_i]| <= K_S2 * (log2 n)^7.
K_S2 = 64

# Default distance bound for near-query sections.
DEFAULT_T = 3

# Archive format.
MAGIC = b"SLIM"
VERSION = 1

# Validation switches between exhaustive and sampled director checks.
EXHAUSTIVE_LIMIT = 300
SAMPLE_PAIRS = 10_000

# Per-query read budget: reads <= QUERY_READ_CONSTANT * height * cap^t.
QUERY_READ_CONSTANT = 64
