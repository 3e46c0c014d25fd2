"""Analog-beamforming codebook design and beam-swept link evaluation."""

__version__ = "0.1.0"

from .arrays import (ArrayGeometry, Codebook, Codeword, Direction,
                     beam_pattern, effective_spatial_response, load_codebook,
                     phase_offset, save_codebook, steering_matrix, steering_vector)
from .baselines import (SteeringSpec, beam_steering_codebook, dft_codebook,
                        equispaced_ula_directions, omni_reference, table1_spec)
from .channel import (ChannelParams, generate_training_set, load_training_set,
                      sample_channel_matrix, sample_channel_vector, save_training_set)
from .evaluate import (EvalReport, ExperimentConfig, empirical_cdf,
                       run_link_experiment, run_spatial_response_experiment,
                       write_report)
from .lloyd import (DesignResult, LloydConfig, Partition, init_codebook,
                    lloyd_design, objective_gradient, partition, project_to_grid,
                    quantized_lloyd_design, update_codeword)
from .metrics import (Metric, codebook_gains, effective_gain,
                      estimate_objective, outage_fraction, rate_from_gain)
from .sweep import SweepConfig, SweepOutcome, omni_receive_codeword, ping_pong_select

__all__ = [
    "ArrayGeometry", "Codebook", "Codeword", "Direction",
    "beam_pattern", "effective_spatial_response", "phase_offset",
    "steering_matrix", "steering_vector", "save_codebook", "load_codebook",
    "SteeringSpec", "beam_steering_codebook", "dft_codebook",
    "equispaced_ula_directions", "omni_reference", "table1_spec",
    "ChannelParams", "sample_channel_vector", "sample_channel_matrix",
    "generate_training_set", "save_training_set", "load_training_set",
    "Metric", "codebook_gains", "effective_gain", "estimate_objective",
    "outage_fraction", "rate_from_gain",
    "LloydConfig", "Partition", "DesignResult", "init_codebook", "partition",
    "objective_gradient", "update_codeword", "lloyd_design", "project_to_grid",
    "quantized_lloyd_design",
    "SweepConfig", "SweepOutcome", "omni_receive_codeword", "ping_pong_select",
    "ExperimentConfig", "EvalReport", "empirical_cdf",
    "run_spatial_response_experiment", "run_link_experiment", "write_report",
]
