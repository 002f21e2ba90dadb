"""Spectral efficiency of point-to-point hybrid MIMO beamforming.

Compares three analog amplifier placements (RF chains, antennas, phase
shifters) against fully digital SVD precoding with water-filling.
"""

from .channel import (
    ChannelRealization,
    GeometricPathSet,
    SystemConfig,
    apply_kronecker,
    array_response,
    draw_channel,
    draw_geometric_channel,
    make_rank_deficient_r_half,
)
from .core import (
    ChannelDecomposition,
    NumericalError,
    Postcoder,
    PowerAllocation,
    Precoder,
    Scheme,
    UnusableChannelError,
    achievable_rate,
    decompose,
    fully_digital_baseline,
    transmit_power,
    waterfill,
)
from .schemes import (
    PhaseShifterDesignParams,
    build_scheme_a,
    build_scheme_b,
    build_scheme_c,
    design_b_tx,
    design_phase_shifters,
)

__version__ = "0.1.0"
from .harness import ExperimentConfig, ExperimentReport, run_experiment, write_report
