"""Simulator and tomography toolkit for multimode Gaussian quantum processes.

Reconstructs the symplectic transfer matrix of an unknown Gaussian process
from coherent probes and quadrature sample means, recovers uniform loss, and
provides seeded experiment sweeps over mode count, measurement scheme, probe
intensity and probe-phase error.
"""

from .core import (
    GaussianState,
    MATRIX_KINDS,
    NotPassiveError,
    ORDERING,
    PASSIVE_BLOCK_TOL,
    STRUCTURAL_TOL,
    apply_symplectic,
    apply_uniform_loss,
    coherent_probe_state,
    embed_unitary,
    extract_unitary,
    is_symplectic,
    matrix_from_json,
    matrix_to_json,
    scaled_frobenius,
    symplectic_form,
    unitary_from_json,
    unitary_to_json,
    vacuum_state,
)
from .device import (
    DeviceModel,
    HETERODYNE,
    HOMODYNE,
    MeasurementConfig,
    ProbeSpec,
    QuadratureSampleMeans,
    SCHEMES,
    SimulatedDevice,
    cubic_phase_mean_map,
    device_from_json,
    device_to_json,
    evolve,
    measure,
    sample_quadratures,
)
from .experiments import (
    ExperimentRecord,
    records_to_csv,
    run_intensity_scaling,
    run_mode_scaling,
    run_phase_error_study,
    run_unitary_scaling,
    write_csv,
)
from .randgen import DEFAULT_R_MAX, derive_seed, haar_unitary, random_symplectic
from .tomography import (
    LossRecoveryError,
    ProbeableDevice,
    ReconstructionResult,
    UnitaryReconstruction,
    default_detection_tol,
    detect_non_gaussian,
    estimate_eta,
    measure_attenuated_matrix,
    probe_ratios,
    reconstruct_element_with_phase_error,
    reconstruct_symplectic,
    reconstruct_unitary,
    reconstruction_to_json,
)

__version__ = "0.1.0"
