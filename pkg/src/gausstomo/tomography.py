"""Symplectic-matrix reconstruction from coherent probes and quadrature means.

The full protocol probes each input mode twice, once with a real-amplitude
coherent state and once with the same amplitude rotated by pi/2, and reads
every X and P mean at the output. Each measured mean, divided by
``sqrt(2) * amplitude``, is one element of the loss-attenuated matrix
``s_tilde = sqrt(eta) S``. Uniform loss is then recovered from
``det(s_tilde) = eta^N`` and divided out.

Passive (linear-optical) devices need only the real-amplitude probes: the
upper and lower halves of each measured column are the real and (negated)
imaginary parts of one unitary column, halving the number of settings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Protocol

import numpy as np

from .core import STRUCTURAL_TOL
from .device import HOMODYNE, MeasurementConfig, ProbeSpec, QuadratureSampleMeans
from .randgen import derive_seed

SQRT2 = math.sqrt(2.0)


class LossRecoveryError(RuntimeError):
    """Transmissivity recovery failed: det(s_tilde) <= 0.

    At very low shot counts (or for a non-symplectic device) the estimated
    matrix can have non-positive determinant; this is surfaced rather than
    clamped so that accuracy studies are not silently biased.
    """


class ProbeableDevice(Protocol):
    """Anything that can be probed with a coherent state and report quadrature
    sample means; satisfied by :class:`gausstomo.device.SimulatedDevice`."""

    @property
    def n_modes(self) -> int: ...

    def probe_and_measure(
        self, probe: ProbeSpec, config: MeasurementConfig
    ) -> QuadratureSampleMeans: ...


@dataclass(frozen=True)
class ReconstructionResult:
    """Raw attenuated estimate, recovered transmissivity and rescaled matrix."""

    s_tilde: np.ndarray
    eta_hat: float
    s_recon: np.ndarray
    probe_amplitude: float
    scheme: str
    shots: int | float


@dataclass(frozen=True)
class UnitaryReconstruction:
    """Reconstructed unitary of a passive device, with diagnostics."""

    u_hat: np.ndarray
    eta_hat: float
    unitarity_residual: float


def estimate_eta(s_tilde: np.ndarray) -> float:
    """Recover the uniform transmissivity from det(s_tilde) = eta^N.

    Raises:
        LossRecoveryError: if the determinant is not positive.
    """
    s_tilde = np.asarray(s_tilde, dtype=float)
    if s_tilde.ndim != 2 or s_tilde.shape[0] != s_tilde.shape[1] or s_tilde.shape[0] % 2:
        raise ValueError(f"expected a 2N x 2N matrix, got shape {s_tilde.shape}")
    n = s_tilde.shape[0] // 2
    sign, logabsdet = np.linalg.slogdet(s_tilde)
    if sign <= 0:
        raise LossRecoveryError(
            "det(s_tilde) <= 0: shot noise too large or device not symplectic"
        )
    return float(np.exp(logabsdet / n))


def _setting_config(config: MeasurementConfig, setting_index: int) -> MeasurementConfig:
    """Give each probe setting its own derived seed stream."""
    if config.analytic:
        return config
    return replace(config, seed=derive_seed(config.seed, setting_index))


def measure_attenuated_matrix(
    device: ProbeableDevice, amplitude: float, config: MeasurementConfig
) -> np.ndarray:
    """Measure the raw attenuated matrix ``s_tilde = sqrt(eta) S`` of a device.

    Issues 2N probe settings (phases 0 and pi/2 on each input mode); every
    setting fills one column of ``s_tilde`` from the measured X and P means,
    each divided by ``sqrt(2) * amplitude``. No loss recovery is attempted,
    so estimates from repeated runs can be averaged before rescaling.

    Raises:
        ValueError: non-positive amplitude, or a homodyne budget below 2.
    """
    if amplitude <= 0:
        raise ValueError("probe amplitude must be > 0")
    if config.scheme == HOMODYNE and not config.analytic and config.shots < 2:
        raise ValueError("homodyne needs at least 2 shots per setting")
    n = device.n_modes
    s_tilde = np.zeros((2 * n, 2 * n))
    scale = SQRT2 * amplitude
    for setting, (j, phase, col) in enumerate(
        (j, phase, col_base + j - 1)
        for j in range(1, n + 1)
        for phase, col_base in ((0.0, 0), (math.pi / 2.0, n))
    ):
        means = device.probe_and_measure(
            ProbeSpec(mode_j=j, amplitude=amplitude, phase=phase),
            _setting_config(config, setting),
        )
        s_tilde[:n, col] = means.x_means / scale
        s_tilde[n:, col] = means.p_means / scale
    return s_tilde


def reconstruct_symplectic(
    device: ProbeableDevice, amplitude: float, config: MeasurementConfig
) -> ReconstructionResult:
    """Reconstruct the full 2N x 2N symplectic matrix of a device.

    Runs :func:`measure_attenuated_matrix`, recovers the transmissivity from
    the determinant of the raw estimate and divides it out.

    Args:
        device: probe-and-measure interface.
        amplitude: coherent probe amplitude, > 0.
        config: measurement scheme, shots and master seed; per-setting seeds
            are derived from it, so settings could run concurrently.

    Raises:
        ValueError: non-positive amplitude, or a homodyne budget below 2.
        LossRecoveryError: non-positive determinant of the raw estimate.
    """
    s_tilde = measure_attenuated_matrix(device, amplitude, config)
    eta_hat = estimate_eta(s_tilde)
    return ReconstructionResult(
        s_tilde=s_tilde,
        eta_hat=eta_hat,
        s_recon=s_tilde / math.sqrt(eta_hat),
        probe_amplitude=amplitude,
        scheme=config.scheme,
        shots=config.shots,
    )


def reconstruct_unitary(
    device: ProbeableDevice, amplitude: float, config: MeasurementConfig
) -> UnitaryReconstruction:
    """Reconstruct the N x N unitary of a passive device with N settings.

    Only real-amplitude probes are used. Column j of the estimate is
    ``x_means / (sqrt(2) amplitude) - i * p_means / (sqrt(2) amplitude)``;
    uniform loss is recovered from ``|det|`` and divided out.

    Raises:
        ValueError: non-positive amplitude or too-small homodyne budget.
        LossRecoveryError: vanishing determinant of the raw estimate.
        NotPassiveError: unitarity residual of the rescaled estimate exceeds
            10x the expected shot-noise scale, which signals an active device.
    """
    from .core import NotPassiveError  # local import keeps module deps one-way

    if amplitude <= 0:
        raise ValueError("probe amplitude must be > 0")
    if config.scheme == HOMODYNE and not config.analytic and config.shots < 2:
        raise ValueError("homodyne needs at least 2 shots per setting")
    n = device.n_modes
    u_tilde = np.zeros((n, n), dtype=complex)
    scale = SQRT2 * amplitude
    shots_per_quad = 0
    for j in range(1, n + 1):
        means = device.probe_and_measure(
            ProbeSpec(mode_j=j, amplitude=amplitude, phase=0.0),
            _setting_config(config, j - 1),
        )
        u_tilde[:, j - 1] = means.x_means / scale - 1j * means.p_means / scale
        shots_per_quad = means.shots_used_per_quadrature

    sign, logabsdet = np.linalg.slogdet(u_tilde)
    if not np.isfinite(logabsdet) or abs(sign) == 0:
        raise LossRecoveryError("det(u_tilde) vanished: cannot recover loss")
    eta_hat = float(np.exp(2.0 * logabsdet / n))
    u_hat = u_tilde / math.sqrt(eta_hat)

    residual = float(np.max(np.abs(u_hat @ u_hat.conj().T - np.eye(n))))
    # Expected residual scale: each matrix entry carries the standard error of
    # a quadrature mean of a minimum-uncertainty output (variance 1/2 homodyne,
    # 1 heterodyne), divided by sqrt(2) alpha sqrt(eta).
    if shots_per_quad > 0:
        outcome_var = 0.5 if config.scheme == HOMODYNE else 1.0
        entry_se = math.sqrt(outcome_var / shots_per_quad) / (scale * math.sqrt(eta_hat))
        noise_scale = entry_se * math.sqrt(2 * n)
    else:
        noise_scale = 0.0
    threshold = max(STRUCTURAL_TOL, 10.0 * noise_scale)
    if residual > threshold:
        raise NotPassiveError(
            f"unitarity residual {residual:.3e} exceeds {threshold:.3e}: "
            "device is not passive up to uniform loss"
        )
    return UnitaryReconstruction(u_hat=u_hat, eta_hat=eta_hat, unitarity_residual=residual)


def reconstruct_element_with_phase_error(
    device: ProbeableDevice,
    i: int,
    j: int,
    amplitude: float,
    phi: float,
    config: MeasurementConfig,
) -> float:
    """Estimate matrix element (i, j), i, j <= N, with a probe phase offset.

    The probe that should have phase 0 is sent with phase ``phi``; under exact
    means the returned value is ``S_ij cos(phi) + S_{i,N+j} sin(phi)``, i.e.
    the phase error leaks the conjugate-column element in at first order.

    Args:
        i: output mode index (X quadrature row), 1-based.
        j: input mode index, 1-based.
        phi: phase-modulation error in radians, |phi| < pi/4.
    """
    if amplitude <= 0:
        raise ValueError("probe amplitude must be > 0")
    if abs(phi) >= math.pi / 4:
        raise ValueError("phase error must satisfy |phi| < pi/4")
    n = device.n_modes
    if not 1 <= i <= n or not 1 <= j <= n:
        raise ValueError(f"element indices ({i}, {j}) out of range 1..{n}")
    means = device.probe_and_measure(
        ProbeSpec(mode_j=j, amplitude=amplitude, phase=phi), config
    )
    return float(means.x_means[i - 1] / (SQRT2 * amplitude))


def probe_ratios(
    device: ProbeableDevice, amplitudes: list[float], config: MeasurementConfig
) -> list[float]:
    """Ratio of the first output P mean to the input X mean, per amplitude.

    For a Gaussian device the ratio is the matrix element ``S_{N+1,1}``
    regardless of amplitude; an amplitude-dependent ratio is the signature of
    dynamics beyond the Gaussian regime.
    """
    ratios = []
    for idx, amp in enumerate(amplitudes):
        if amp <= 0:
            raise ValueError("probe amplitudes must be > 0")
        means = device.probe_and_measure(
            ProbeSpec(mode_j=1, amplitude=amp, phase=0.0),
            _setting_config(config, idx),
        )
        ratios.append(float(means.p_means[0] / (SQRT2 * amp)))
    return ratios


def default_detection_tol(amplitudes: list[float], config: MeasurementConfig) -> float:
    """5x the largest analytic shot-noise standard error among the ratios.

    Assumes a near-coherent output (outcome variance 1/2 for homodyne, 1 for
    heterodyne). Floored at the structural tolerance so the analytic backend
    is not tripped by roundoff.
    """
    if config.analytic:
        return STRUCTURAL_TOL
    if config.scheme == HOMODYNE:
        outcome_var, shots = 0.5, config.shots // 2
    else:
        outcome_var, shots = 1.0, config.shots
    if shots < 1:
        raise ValueError("shot budget too small for this scheme")
    worst_se = max(
        math.sqrt(outcome_var / shots) / (SQRT2 * amp) for amp in amplitudes
    )
    return max(STRUCTURAL_TOL, 5.0 * worst_se)


def detect_non_gaussian(
    device: ProbeableDevice,
    amplitudes: list[float],
    config: MeasurementConfig,
    tol: float | None = None,
) -> tuple[bool, list[float]]:
    """Probe at several amplitudes and flag amplitude-dependent response.

    Args:
        amplitudes: at least two distinct positive probe amplitudes.
        tol: decision threshold on the maximum pairwise ratio difference;
            defaults to :func:`default_detection_tol`.

    Returns:
        ``(non_gaussian, ratios)``: the verdict and the per-amplitude ratios.
    """
    if len(amplitudes) < 2:
        raise ValueError("need at least two probe amplitudes")
    if len(set(float(a) for a in amplitudes)) != len(amplitudes):
        raise ValueError("probe amplitudes must be distinct")
    if tol is None:
        tol = default_detection_tol(amplitudes, config)
    ratios = probe_ratios(device, amplitudes, config)
    spread = max(ratios) - min(ratios)
    return spread > tol, ratios


def reconstruction_to_json(
    result: ReconstructionResult, frobenius_vs_truth: float | None = None
) -> dict:
    """Encode a reconstruction as a JSON-ready dict.

    ``shots`` is null for the analytic backend, since JSON has no infinity.
    """
    from .core import matrix_to_json

    return {
        "s_tilde": matrix_to_json(result.s_tilde, "symplectic"),
        "eta_hat": float(result.eta_hat),
        "s_recon": matrix_to_json(result.s_recon, "symplectic"),
        "scheme": result.scheme,
        "shots": None if math.isinf(result.shots) else int(result.shots),
        "amplitude": float(result.probe_amplitude),
        "frobenius_vs_truth": None if frobenius_vs_truth is None else float(frobenius_vs_truth),
    }
