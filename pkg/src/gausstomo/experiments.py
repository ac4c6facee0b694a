"""Repeatable accuracy sweeps over mode count, scheme, probe budget and phase.

Every runner returns a list of :class:`ExperimentRecord` rows (one per swept
combination) that can be dumped to CSV. Seeds are derived per repetition, so
a run is bit-reproducible from its master seed, and the same random devices
are shared across measurement schemes to sharpen comparisons.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .core import embed_unitary, scaled_frobenius
from .device import HETERODYNE, HOMODYNE, DeviceModel, MeasurementConfig, SCHEMES, SimulatedDevice
from .randgen import DEFAULT_R_MAX, derive_seed, haar_unitary, random_symplectic
from .tomography import (
    LossRecoveryError,
    estimate_eta,
    measure_attenuated_matrix,
    reconstruct_element_with_phase_error,
    reconstruct_symplectic,
    reconstruct_unitary,
)
from .core import NotPassiveError

# seed stream tags, so device draws and measurement noise never collide
_DEV = 0
_MEAS = 1


@dataclass(frozen=True)
class ExperimentRecord:
    """One row of an experiment sweep: a swept combination and its error stats."""

    experiment_id: str
    n_modes: int
    scheme: str
    eta: float
    amplitude: float
    shots: int | float
    trials: int
    repetitions: int
    f_mean: float
    f_stderr: float
    seed: int
    dropped: int


def _stats(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    if arr.size == 1:
        return float(arr[0]), math.nan
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def run_mode_scaling(
    n_list: Sequence[int],
    schemes: Sequence[str] = SCHEMES,
    eta_list: Sequence[float] = (1.0, 0.5),
    amplitude: float = 1000.0,
    shots: int | float = 100,
    repetitions: int = 50,
    seed: int = 0,
    r_max: float = DEFAULT_R_MAX,
) -> list[ExperimentRecord]:
    """Full-matrix reconstruction error versus mode count.

    For every repetition a fresh random symplectic device is drawn and probed
    under every (scheme, eta) combination, with the same device shared across
    combinations so scheme comparisons are paired.
    """
    errors: dict[tuple[int, str, float], list[float]] = {}
    dropped: dict[tuple[int, str, float], int] = {}
    for n in n_list:
        for rep in range(repetitions):
            s_true = random_symplectic(n, r_max=r_max, seed=derive_seed(seed, _DEV, n, rep))
            for eta_idx, eta in enumerate(eta_list):
                model = DeviceModel(s_true, eta=eta)
                for scheme_idx, scheme in enumerate(schemes):
                    key = (n, scheme, eta)
                    config = MeasurementConfig(
                        scheme=scheme,
                        shots=shots,
                        seed=derive_seed(seed, _MEAS, n, rep, eta_idx, scheme_idx),
                    )
                    try:
                        result = reconstruct_symplectic(SimulatedDevice(model), amplitude, config)
                    except LossRecoveryError:
                        dropped[key] = dropped.get(key, 0) + 1
                        continue
                    errors.setdefault(key, []).append(scaled_frobenius(s_true, result.s_recon))
    records = []
    for n in n_list:
        for scheme in schemes:
            for eta in eta_list:
                key = (n, scheme, eta)
                f_mean, f_stderr = _stats(errors.get(key, []))
                records.append(
                    ExperimentRecord(
                        experiment_id="mode-scaling",
                        n_modes=n,
                        scheme=scheme,
                        eta=eta,
                        amplitude=amplitude,
                        shots=shots,
                        trials=1,
                        repetitions=repetitions,
                        f_mean=f_mean,
                        f_stderr=f_stderr,
                        seed=seed,
                        dropped=dropped.get(key, 0),
                    )
                )
    return records


def run_unitary_scaling(
    n_list: Sequence[int],
    schemes: Sequence[str] = SCHEMES,
    eta_list: Sequence[float] = (1.0,),
    amplitude: float = 1000.0,
    shots: int | float = 100,
    repetitions: int = 50,
    seed: int = 0,
) -> list[ExperimentRecord]:
    """Passive-shortcut reconstruction error versus mode count, Haar devices.

    The error metric is the scaled Frobenius distance between the true and
    reconstructed N x N unitaries. Repetitions whose reconstruction fails the
    passivity or loss-recovery checks are counted in ``dropped``.
    """
    errors: dict[tuple[int, str, float], list[float]] = {}
    dropped: dict[tuple[int, str, float], int] = {}
    for n in n_list:
        for rep in range(repetitions):
            u_true = haar_unitary(n, seed=derive_seed(seed, _DEV, n, rep))
            s_true = embed_unitary(u_true)
            for eta_idx, eta in enumerate(eta_list):
                model = DeviceModel(s_true, eta=eta)
                for scheme_idx, scheme in enumerate(schemes):
                    key = (n, scheme, eta)
                    config = MeasurementConfig(
                        scheme=scheme,
                        shots=shots,
                        seed=derive_seed(seed, _MEAS, n, rep, eta_idx, scheme_idx),
                    )
                    try:
                        result = reconstruct_unitary(SimulatedDevice(model), amplitude, config)
                    except (LossRecoveryError, NotPassiveError):
                        dropped[key] = dropped.get(key, 0) + 1
                        continue
                    errors.setdefault(key, []).append(
                        scaled_frobenius(u_true, result.u_hat, n_modes=n)
                    )
    records = []
    for n in n_list:
        for scheme in schemes:
            for eta in eta_list:
                key = (n, scheme, eta)
                f_mean, f_stderr = _stats(errors.get(key, []))
                records.append(
                    ExperimentRecord(
                        experiment_id="unitary-scaling",
                        n_modes=n,
                        scheme=scheme,
                        eta=eta,
                        amplitude=amplitude,
                        shots=shots,
                        trials=1,
                        repetitions=repetitions,
                        f_mean=f_mean,
                        f_stderr=f_stderr,
                        seed=seed,
                        dropped=dropped.get(key, 0),
                    )
                )
    return records


def run_intensity_scaling(
    amplitude_list: Sequence[float],
    trials_list: Sequence[int],
    shots: int | float = 100,
    seed: int = 0,
    n_modes: int = 5,
    scheme: str = HETERODYNE,
    eta: float = 1.0,
    repetitions: int = 20,
    r_max: float = DEFAULT_R_MAX,
) -> list[ExperimentRecord]:
    """Reconstruction error versus probe amplitude and trial averaging.

    One fixed random device is probed at every (amplitude, trials) pair; the
    raw attenuated estimates of all trials are averaged before the loss is
    recovered, so error should track 1 / (amplitude * sqrt(trials)).
    """
    s_true = random_symplectic(n_modes, r_max=r_max, seed=derive_seed(seed, _DEV))
    model = DeviceModel(s_true, eta=eta)
    records = []
    for amp_idx, amplitude in enumerate(amplitude_list):
        for trials_idx, trials in enumerate(trials_list):
            if trials < 1:
                raise ValueError("trial counts must be >= 1")
            errs = []
            n_dropped = 0
            for rep in range(repetitions):
                tilde_sum = np.zeros((2 * n_modes, 2 * n_modes))
                for trial in range(trials):
                    config = MeasurementConfig(
                        scheme=scheme,
                        shots=shots,
                        seed=derive_seed(seed, _MEAS, amp_idx, trials_idx, rep, trial),
                    )
                    tilde_sum += measure_attenuated_matrix(
                        SimulatedDevice(model), amplitude, config
                    )
                tilde_avg = tilde_sum / trials
                try:
                    eta_hat = estimate_eta(tilde_avg)
                except LossRecoveryError:
                    n_dropped += 1
                    continue
                errs.append(scaled_frobenius(s_true, tilde_avg / math.sqrt(eta_hat)))
            f_mean, f_stderr = _stats(errs)
            records.append(
                ExperimentRecord(
                    experiment_id="intensity",
                    n_modes=n_modes,
                    scheme=scheme,
                    eta=eta,
                    amplitude=amplitude,
                    shots=shots,
                    trials=trials,
                    repetitions=repetitions,
                    f_mean=f_mean,
                    f_stderr=f_stderr,
                    seed=seed,
                    dropped=n_dropped,
                )
            )
    return records


def run_phase_error_study(
    phi_max: float,
    trials_list: Sequence[int],
    seed: int = 0,
    repetitions: int = 200,
    amplitude: float = 1.0,
    r_max: float = DEFAULT_R_MAX,
) -> list[ExperimentRecord]:
    """Element estimation error under random probe phase offsets, exact means.

    A fixed single-mode random symplectic device is probed with phase errors
    drawn uniformly from [-phi_max, phi_max]. The reported error is the
    deviation of the trial-averaged element estimate from the true element,
    normalised by the Euclidean size of the element's (X, P) row pair.
    """
    if phi_max < 0 or phi_max >= math.pi / 4:
        raise ValueError("phi_max must lie in [0, pi/4)")
    s_true = random_symplectic(1, r_max=r_max, seed=derive_seed(seed, _DEV))
    model = DeviceModel(s_true, eta=1.0)
    device = SimulatedDevice(model)
    config = MeasurementConfig(scheme=HOMODYNE, shots=math.inf)
    target = s_true[0, 0]
    norm = math.hypot(s_true[0, 0], s_true[0, 1])
    records = []
    for trials_idx, trials in enumerate(trials_list):
        if trials < 1:
            raise ValueError("trial counts must be >= 1")
        errs = []
        for rep in range(repetitions):
            rng = np.random.default_rng(derive_seed(seed, _MEAS, trials_idx, rep))
            phis = rng.uniform(-phi_max, phi_max, trials)
            estimates = [
                reconstruct_element_with_phase_error(device, 1, 1, amplitude, phi, config)
                for phi in phis
            ]
            errs.append(abs(float(np.mean(estimates)) - target) / norm)
        f_mean, f_stderr = _stats(errs)
        records.append(
            ExperimentRecord(
                experiment_id="phase-error",
                n_modes=1,
                scheme=config.scheme,
                eta=1.0,
                amplitude=amplitude,
                shots=config.shots,
                trials=trials,
                repetitions=repetitions,
                f_mean=f_mean,
                f_stderr=f_stderr,
                seed=seed,
                dropped=0,
            )
        )
    return records


def _format_cell(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return repr(value)
    return str(value)


def records_to_csv(records: Iterable[ExperimentRecord]) -> str:
    """Render records as CSV text, one header row plus one row per record."""
    columns = [f.name for f in fields(ExperimentRecord)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([_format_cell(getattr(record, c)) for c in columns])
    return buf.getvalue()


def write_csv(records: Iterable[ExperimentRecord], path) -> None:
    """Write records to ``path`` as CSV in one shot."""
    text = records_to_csv(records)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
