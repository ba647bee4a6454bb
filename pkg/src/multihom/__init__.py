"""Beam-splitter photon counting when the input wave packets only partly overlap.

The output imbalance distribution splits into spin-j channels; this package
evaluates channel probabilities, channel OIDs and their mixture exactly (log
domain, any n) and asymptotically, and checks them against a dense
first-quantized reference for small n.
"""
from .asymptotics import (
    ScaledPoint,
    bsc_rate_function,
    gaussian_width,
    jstar,
    rate_derivative1,
    rate_derivative2,
    rate_function,
    turning_points,
    wkb_envelope,
    wkb_region,
    xbar_minimizer,
)
from .channels import (
    ChannelTable,
    Distribution,
    ExperimentConfig,
    bsc_oid,
    channel_oid,
    channel_probability,
    channel_table,
    classical_imbalance,
    classical_oid_density,
    log_channel_probability,
    oid,
)
from .combinatorics import (
    HalfIndex,
    SignedLogValue,
    binary_relative_entropy,
    log_binomial,
    log_binomial_pmf,
    log_factorial,
    multiplicity,
    signed_log_sum,
)
from .representations import (
    GramMatrix,
    OccupationMatrix,
    Rotation,
    gl2_diag_element,
    gl2_element,
    louck_coefficient,
    terminating_2f1,
    wigner_d_column,
    wigner_small_d,
)

__version__ = "0.1.0"
