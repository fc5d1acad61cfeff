"""Link-level metrics: achievable rate, uncoded QPSK BER, and beam-pattern profiles."""

from dataclasses import dataclass

import numpy as np

from . import numerics
from .channel import _steering_matrix
from .errors import InvalidInputError
from .feedback import basis_matrix

BEAM_PATTERN_GRID = 2048


@dataclass(frozen=True)
class LinkMetrics:
    """One (scheme, SNR) cell of a Monte-Carlo sweep."""

    snr_db: float
    rate_bps_hz: float
    ber: float
    trials: int
    bit_errors: int
    bits_sent: int

    def __post_init__(self):
        if self.rate_bps_hz < 0 or not 0.0 <= self.ber <= 1.0:
            raise InvalidInputError("rate must be >= 0 and ber within [0, 1]")
        if self.bits_sent > 0 and self.ber != self.bit_errors / self.bits_sent:
            raise InvalidInputError("ber must equal bit_errors / bits_sent")


@dataclass(frozen=True, eq=False)
class BeamPattern:
    angles: np.ndarray
    gain: np.ndarray               # normalized so the trapezoidal integral is 1
    gamma: int


def achievable_rate(h, f, snr_linear):
    """log2 det(I_N + snr * H F F^H H^H) for a unit-Frobenius-norm precoder F."""
    h = np.asarray(h, dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128)
    if h.ndim != 2 or f.ndim != 2 or h.shape[1] != f.shape[0]:
        raise InvalidInputError(f"shape mismatch: H is {h.shape}, F is {f.shape}")
    if abs(np.linalg.norm(f) - 1.0) > 1e-6:
        raise InvalidInputError("precoder must have unit Frobenius norm")
    if not (snr_linear > 0 and np.isfinite(snr_linear)):
        raise InvalidInputError("snr_linear must be positive and finite")
    hf = h @ f
    n = h.shape[0]
    gram = np.eye(n) + snr_linear * (hf @ hf.conj().T)
    return numerics.log_det_hermitian(gram)


def ber_qpsk_mmse(h, f, snr_linear, num_symbols, rng):
    """Uncoded QPSK over y = H F s + z with joint linear MMSE detection.

    Gray-mapped QPSK symbols with E[s s^H] = P * I (P = snr, unit noise
    variance), estimator s_hat = P F^H H^H (P H F F^H H^H + I)^{-1} y, and
    per-quadrature sign slicing. Returns (bit_errors, bits_sent).
    """
    h = np.asarray(h, dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128)
    if h.shape[1] != f.shape[0]:
        raise InvalidInputError(f"shape mismatch: H is {h.shape}, F is {f.shape}")
    if num_symbols < 1:
        raise InvalidInputError("num_symbols must be >= 1")
    n = h.shape[0]
    s = f.shape[1]
    p = float(snr_linear)

    bits = rng.integers(0, 2, size=(2, s, num_symbols))
    symbols = ((1.0 - 2.0 * bits[0]) + 1j * (1.0 - 2.0 * bits[1])) / np.sqrt(2.0)
    noise = (rng.standard_normal((n, num_symbols))
             + 1j * rng.standard_normal((n, num_symbols))) / np.sqrt(2.0)

    hf = h @ f
    y = np.sqrt(p) * (hf @ symbols) + noise
    cov = p * (hf @ hf.conj().T) + np.eye(n)
    detector = p * np.linalg.solve(cov, hf).conj().T      # S x N, Hermitian cov
    est = detector @ y

    errors = int(np.count_nonzero((est.real < 0) != bits[0]))
    errors += int(np.count_nonzero((est.imag < 0) != bits[1]))
    return errors, 2 * s * num_symbols


def beam_pattern(spec, center_index, grid_size=BEAM_PATTERN_GRID):
    """Normalized radiated power of one basis element across the codebook sector.

    g(phi) = |h_t^H(phi) psi_k|^2 scaled so that its trapezoidal integral
    over the angle grid equals one.
    """
    if grid_size < 64:
        raise InvalidInputError("grid_size must be >= 64")
    cb = spec.codebook
    if not 0 <= center_index < cb.size:
        raise InvalidInputError(f"center_index must be in [0, {cb.size}), got {center_index}")
    column = basis_matrix(spec, np.array([cb.centers[center_index]]))[:, 0]
    lo, hi = cb.sector
    grid = np.linspace(lo, hi, grid_size)
    responses = _steering_matrix(spec.tx, grid)           # M x grid
    gain = np.abs(responses.conj().T @ column) ** 2
    gain /= np.trapezoid(gain, grid)
    return BeamPattern(angles=grid, gain=gain, gamma=spec.gamma)
