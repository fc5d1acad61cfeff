"""Feedback-aware precoder approximation and feedback-bit accounting.

The receiver approximates the optimal precoder as F_hat = Psi(phi) @ G where
Psi's columns are (multi-beam) transmit array responses at angles drawn from
a shared discrete codebook. Orthogonal matching pursuit picks the K best
angles, a least-squares solve gives G, and the feedback message carries only
the K angle indices plus the (optionally quantized) K x S combining matrix.
"""

import math
import struct
from dataclasses import dataclass

import numpy as np

from . import numerics
from .channel import ArrayGeometry, _steering_matrix
from .errors import DomainError, InvalidInputError

# Residuals at or below this norm are treated as exact recoveries; the
# greedy argmax is meaningless on a numerically zero residual.
_ZERO_RESIDUAL = 1e-12

COMBINING_MODES = ("general", "unitary", "selection")


def _log2_exact(n, name):
    if n < 1 or (n & (n - 1)) != 0:
        raise InvalidInputError(f"{name} must be a power of two, got {n}")
    return n.bit_length() - 1


@dataclass(frozen=True)
class AngleCodebook:
    """Uniform angle grid over a sector; entry i is the middle of sub-sector i."""

    sector: tuple
    size: int

    def __post_init__(self):
        lo, hi = float(self.sector[0]), float(self.sector[1])
        if not (-np.pi <= lo < hi <= np.pi):
            raise InvalidInputError(f"sector must satisfy -pi <= lo < hi <= pi, got ({lo}, {hi})")
        _log2_exact(self.size, "codebook size")

    @property
    def resolution(self):
        lo, hi = self.sector
        return (hi - lo) / self.size

    @property
    def centers(self):
        lo, _ = self.sector
        return lo + (np.arange(self.size) + 0.5) * self.resolution

    @property
    def index_bits(self):
        return _log2_exact(self.size, "codebook size")


@dataclass(frozen=True)
class BasisSpec:
    """Shared transmitter/receiver agreement: codebook, array geometry, beams per element."""

    codebook: AngleCodebook
    tx: ArrayGeometry
    gamma: int = 1

    def __post_init__(self):
        if self.gamma < 1:
            raise InvalidInputError("gamma must be >= 1")


@dataclass(frozen=True)
class ComplexCodebook:
    """Quantizer for combining-matrix entries: ideal passthrough or uniform polar grid."""

    mode: str                      # "ideal" | "uniform_polar"
    magnitude_levels: int = 0
    phase_levels: int = 0

    def __post_init__(self):
        if self.mode not in ("ideal", "uniform_polar"):
            raise InvalidInputError(f"unknown complex codebook mode {self.mode!r}")
        if self.mode == "uniform_polar":
            _log2_exact(self.magnitude_levels, "magnitude_levels")
            _log2_exact(self.phase_levels, "phase_levels")

    @classmethod
    def ideal(cls):
        return cls(mode="ideal")

    @classmethod
    def uniform_polar(cls, magnitude_levels, phase_levels):
        return cls(mode="uniform_polar", magnitude_levels=magnitude_levels, phase_levels=phase_levels)

    @property
    def size(self):
        if self.mode == "ideal":
            raise InvalidInputError("ideal codebook has no finite size")
        return self.magnitude_levels * self.phase_levels

    @property
    def bits_per_value(self):
        # Ideal amplitude feedback is excluded from the bit accounting.
        if self.mode == "ideal":
            return 0
        return _log2_exact(self.size, "complex codebook size")


@dataclass(frozen=True, eq=False)
class FeedbackReport:
    angle_indices: tuple           # K indices into the shared angle codebook
    combining: np.ndarray          # K x S, already quantized if applicable
    k: int
    gamma: int
    bits_angles: int
    bits_amplitudes: int
    magnitude_scale: float = None  # polar-quantizer range, sent unquantized


def quantize_angle(cb, angle):
    """Index of the nearest codebook center; out-of-sector angles are clamped first.

    Equidistant ties resolve toward the lower index.
    """
    if not np.isfinite(angle):
        raise InvalidInputError("angle must be finite")
    lo, hi = cb.sector
    angle = min(max(float(angle), lo), hi)
    return int(np.argmin(np.abs(angle - cb.centers)))


def basis_matrix(spec, angles):
    """Basis columns: superpositions of gamma beams spread inside each sub-sector.

    Column k is (1/sqrt(gamma)) * sum_{g=1..gamma} h_t(phi_k - dphi/2 + g*dphi/(gamma+1));
    gamma=1 reduces to the plain steering vector at phi_k.
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if angles.size == 0:
        raise InvalidInputError("angles must be non-empty")
    dphi = spec.codebook.resolution
    gamma = spec.gamma
    offsets = -dphi / 2.0 + np.arange(1, gamma + 1) * dphi / (gamma + 1)
    cols = np.zeros((spec.tx.num_elements, angles.size), dtype=np.complex128)
    for off in offsets:
        cols += _steering_matrix(spec.tx, angles + off)
    return cols / np.sqrt(gamma)


def dictionary(spec):
    """Full basis over every codebook center (the OMP search dictionary)."""
    return basis_matrix(spec, spec.codebook.centers)


def omp_approximate(f_opt, spec, k):
    """Greedy angle selection and least-squares combining for F_hat = Psi(phi) G.

    Per iteration: correlate every dictionary column with the residual, take
    the strongest (ties to the lowest index), re-solve G over all selected
    columns, and renormalize the residual. Returns the selected indices, the
    combining matrix scaled so ||Psi(phi) G|| = 1, and the residual norms
    ||F_opt - Psi(phi) G|| recorded per iteration. Stops early if the
    residual hits zero before k picks.
    """
    cb = spec.codebook
    if not 1 <= k <= cb.size:
        raise InvalidInputError(f"k must be in [1, {cb.size}], got {k}")
    psi = dictionary(spec)
    f = f_opt.matrix
    f_res = f
    selected = []
    history = []
    g = None
    for _ in range(k):
        corr = psi.conj().T @ f_res
        metric = np.sum(np.abs(corr) ** 2, axis=1)     # diagonal of corr @ corr^H
        pick = int(np.argmax(metric))
        if pick in selected:
            break                                      # numerically degenerate residual
        selected.append(pick)
        atoms = psi[:, selected]
        g = numerics.least_squares(atoms, f)
        resid = f - atoms @ g
        rnorm = float(np.linalg.norm(resid))
        history.append(rnorm)
        if rnorm <= _ZERO_RESIDUAL:
            break
        f_res = resid / rnorm

    atoms = psi[:, selected]
    scale = float(np.linalg.norm(atoms @ g))
    if scale <= _ZERO_RESIDUAL:
        raise DomainError("selected basis carries no energy of the target precoder")
    return tuple(selected), g / scale, history


def _apply_combining_mode(g, atoms, mode):
    if mode == "general":
        return g
    if mode == "unitary":
        # Nearest matrix with orthonormal columns: the unitary polar factor.
        u, _, v = numerics.svd(g)
        g = u @ v.conj().T
    elif mode == "selection":
        # One beam per stream: keep the dominant entry, preserve column norm.
        out = np.zeros_like(g)
        for j in range(g.shape[1]):
            i = int(np.argmax(np.abs(g[:, j])))
            pivot = g[i, j]
            if np.abs(pivot) > 0:
                out[i, j] = pivot / np.abs(pivot) * np.linalg.norm(g[:, j])
        g = out
    else:
        raise InvalidInputError(f"unknown combining mode {mode!r}")
    scale = float(np.linalg.norm(atoms @ g))
    if scale <= _ZERO_RESIDUAL:
        raise DomainError("combining mode produced a zero precoder")
    return g / scale


def _polar_quantize_indices(values, cc, gmax):
    dm = gmax / cc.magnitude_levels
    dp = 2.0 * np.pi / cc.phase_levels
    mi = np.clip(np.floor(np.abs(values) / dm).astype(int), 0, cc.magnitude_levels - 1)
    pi_ = np.clip(np.floor((np.angle(values) + np.pi) / dp).astype(int), 0, cc.phase_levels - 1)
    return mi, pi_


def _polar_dequantize(mi, pi_, cc, gmax):
    dm = gmax / cc.magnitude_levels
    dp = 2.0 * np.pi / cc.phase_levels
    mag = (mi + 0.5) * dm
    phase = -np.pi + (pi_ + 0.5) * dp
    return mag * np.exp(1j * phase)


def build_report(f_opt, spec, k, cc, combining_mode="general"):
    """Run the greedy approximation and pack the result as a feedback message.

    In ideal mode the combining matrix passes through untouched and its bit
    count is zero. In uniform_polar mode each entry is quantized on a polar
    grid whose magnitude range is the matrix maximum; that range travels as
    one extra unquantized scalar outside the bit accounting.
    """
    if combining_mode not in COMBINING_MODES:
        raise InvalidInputError(f"unknown combining mode {combining_mode!r}")
    indices, g, _ = omp_approximate(f_opt, spec, k)
    atoms = basis_matrix(spec, spec.codebook.centers[list(indices)])
    g = _apply_combining_mode(g, atoms, combining_mode)

    k_actual = len(indices)
    num_streams = g.shape[1]
    bits_angles = k_actual * spec.codebook.index_bits

    if cc.mode == "ideal":
        combining = g
        bits_amplitudes = 0
        scale = None
    else:
        gmax = float(np.max(np.abs(g)))
        if combining_mode == "selection":
            # Zeros are structural (conveyed by position), only the K
            # surviving entries pass through the quantizer.
            combining = np.zeros_like(g)
            mask = np.abs(g) > 0
            mi, pi_ = _polar_quantize_indices(g[mask], cc, gmax)
            combining[mask] = _polar_dequantize(mi, pi_, cc, gmax)
        else:
            mi, pi_ = _polar_quantize_indices(g, cc, gmax)
            combining = _polar_dequantize(mi, pi_, cc, gmax)
        if combining_mode == "selection":
            bits_amplitudes = k_actual * math.ceil(math.log2(num_streams)) + k_actual * cc.bits_per_value
        else:
            bits_amplitudes = k_actual * num_streams * cc.bits_per_value
        scale = gmax

    return FeedbackReport(
        angle_indices=indices,
        combining=combining,
        k=k_actual,
        gamma=spec.gamma,
        bits_angles=bits_angles,
        bits_amplitudes=bits_amplitudes,
        magnitude_scale=scale,
    )


def reconstruct_precoder(report, spec):
    """Transmitter-side rebuild: F_hat = Psi(angles) @ G, renormalized to unit norm."""
    from .precoding import Precoder

    cb = spec.codebook
    if report.gamma != spec.gamma:
        raise InvalidInputError(
            f"report gamma {report.gamma} does not match spec gamma {spec.gamma}"
        )
    idx = np.asarray(report.angle_indices, dtype=int)
    if idx.size == 0 or np.any(idx < 0) or np.any(idx >= cb.size):
        raise InvalidInputError("angle index out of codebook range")
    psi = basis_matrix(spec, cb.centers[idx])
    f = psi @ report.combining
    norm = np.linalg.norm(f)
    if norm <= _ZERO_RESIDUAL:
        raise DomainError("report reconstructs to a zero precoder")
    return Precoder(f / norm)


# ---------------------------------------------------------------------------
# Feedback overhead accounting
# ---------------------------------------------------------------------------

_SCHEME_PARAMS = {
    "direct_H": ("m", "n", "coeff_codebook_size"),
    "direct_F": ("m", "s", "coeff_codebook_size"),
    "sparse_precoder": ("q", "s", "angle_codebook_size", "coeff_codebook_size"),
    "multilevel_csi": ("k", "angle_codebook_size", "coeff_codebook_size"),
    "proposed": ("k", "s", "angle_codebook_size", "coeff_codebook_size"),
}


def overhead_bits(scheme, *, m=None, n=None, s=None, q=None, k=None,
                  angle_codebook_size=None, coeff_codebook_size=None):
    """(angle_bits, amplitude_bits) required by each feedback scheme.

    direct_H:        (0,                M*N*log2|Cc|)
    direct_F:        (0,                M*S*log2|Cc|)
    sparse_precoder: (Q*log2|Cphi|,     Q*S*log2|Cc|)
    multilevel_csi:  (2*K*log2|Cphi|,   K*log2|Cc|)
    proposed:        (K*log2|Cphi|,     K*S*log2|Cc|)
    """
    if scheme not in _SCHEME_PARAMS:
        raise InvalidInputError(f"unknown scheme {scheme!r}")
    have = {"m": m, "n": n, "s": s, "q": q, "k": k,
            "angle_codebook_size": angle_codebook_size,
            "coeff_codebook_size": coeff_codebook_size}
    for name in _SCHEME_PARAMS[scheme]:
        if have[name] is None:
            raise InvalidInputError(f"scheme {scheme!r} requires parameter {name!r}")
        if have[name] < 1:
            raise InvalidInputError(f"parameter {name!r} must be >= 1")

    if scheme in ("direct_H", "direct_F"):
        cbits = _log2_exact(coeff_codebook_size, "coeff_codebook_size")
        other = n if scheme == "direct_H" else s
        return 0, m * other * cbits

    abits = _log2_exact(angle_codebook_size, "angle_codebook_size")
    cbits = _log2_exact(coeff_codebook_size, "coeff_codebook_size")
    if scheme == "sparse_precoder":
        return q * abits, q * s * cbits
    if scheme == "multilevel_csi":
        return 2 * k * abits, k * cbits
    return k * abits, k * s * cbits


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------
#
# header: K (u16 LE), gamma (u8), flags (u8, bit0 = quantized amplitudes)
# quantized mode only: magnitude range as one f64 LE
# bit-packed payload (MSB-first within each byte, zero-padded to a byte):
#   K angle indices, log2|Cphi| bits each
#   quantized mode: K*S combining entries, log2|Cc| bits each
#                   (magnitude index in the high bits, phase index low)
# ideal mode: K*S combining entries appended as raw (f64 real, f64 imag) LE pairs

_FLAG_QUANTIZED = 0x01


class _BitWriter:
    def __init__(self):
        self._bytes = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value, nbits):
        if value < 0 or value >= (1 << nbits):
            raise InvalidInputError(f"value {value} does not fit in {nbits} bits")
        self._acc = (self._acc << nbits) | value
        self._nbits += nbits
        while self._nbits >= 8:
            self._nbits -= 8
            self._bytes.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    def getvalue(self):
        out = bytes(self._bytes)
        if self._nbits:
            out += bytes([(self._acc << (8 - self._nbits)) & 0xFF])
        return out


class _BitReader:
    def __init__(self, data):
        self._data = data
        self._pos = 0

    def read(self, nbits):
        value = 0
        for _ in range(nbits):
            byte = self._data[self._pos // 8]
            bit = (byte >> (7 - self._pos % 8)) & 1
            value = (value << 1) | bit
            self._pos += 1
        return value

    @property
    def bytes_consumed(self):
        return (self._pos + 7) // 8


def serialize_report(report, spec, cc):
    """Encode a report for the feedback link; see the layout notes above."""
    k = report.k
    if k != len(report.angle_indices):
        raise InvalidInputError("report k does not match its index list")
    quantized = cc.mode != "ideal"
    if quantized and np.any(np.abs(report.combining) == 0):
        raise InvalidInputError(
            "zero combining entries are not representable on the polar grid; "
            "serialize selection-mode reports with an ideal codebook"
        )
    flags = _FLAG_QUANTIZED if quantized else 0
    out = struct.pack("<HBB", k, report.gamma, flags)
    if quantized:
        out += struct.pack("<d", report.magnitude_scale)

    writer = _BitWriter()
    abits = spec.codebook.index_bits
    for idx in report.angle_indices:
        writer.write(int(idx), abits)
    if quantized:
        mi, pi_ = _polar_quantize_indices(report.combining, cc, report.magnitude_scale)
        pbits = _log2_exact(cc.phase_levels, "phase_levels")
        for row in range(report.combining.shape[0]):
            for col in range(report.combining.shape[1]):
                writer.write((int(mi[row, col]) << pbits) | int(pi_[row, col]), cc.bits_per_value)
    out += writer.getvalue()

    if not quantized:
        for value in report.combining.reshape(-1):
            out += struct.pack("<dd", float(value.real), float(value.imag))
    return out


def deserialize_report(data, spec, cc, num_streams):
    """Decode a serialized report; the basis spec, codebooks, and S are shared state."""
    if len(data) < 4:
        raise InvalidInputError("truncated report header")
    k, gamma, flags = struct.unpack_from("<HBB", data, 0)
    offset = 4
    quantized = bool(flags & _FLAG_QUANTIZED)
    if quantized != (cc.mode != "ideal"):
        raise InvalidInputError("report mode flag does not match the shared complex codebook")
    scale = None
    if quantized:
        (scale,) = struct.unpack_from("<d", data, offset)
        offset += 8

    abits = spec.codebook.index_bits
    payload_bits = k * abits + (k * num_streams * cc.bits_per_value if quantized else 0)
    payload_len = (payload_bits + 7) // 8
    if len(data) < offset + payload_len:
        raise InvalidInputError("truncated report payload")
    reader = _BitReader(data[offset:offset + payload_len])
    indices = tuple(reader.read(abits) for _ in range(k))
    if any(i >= spec.codebook.size for i in indices):
        raise InvalidInputError("angle index out of codebook range")

    if quantized:
        pbits = _log2_exact(cc.phase_levels, "phase_levels")
        mi = np.empty((k, num_streams), dtype=int)
        pi_ = np.empty((k, num_streams), dtype=int)
        for row in range(k):
            for col in range(num_streams):
                word = reader.read(cc.bits_per_value)
                mi[row, col] = word >> pbits
                pi_[row, col] = word & (cc.phase_levels - 1)
        combining = _polar_dequantize(mi, pi_, cc, scale)
        bits_amplitudes = k * num_streams * cc.bits_per_value
    else:
        offset += payload_len
        need = k * num_streams * 16
        if len(data) < offset + need:
            raise InvalidInputError("truncated raw combining entries")
        flat = np.frombuffer(data, dtype="<f8", count=2 * k * num_streams, offset=offset)
        combining = (flat[0::2] + 1j * flat[1::2]).reshape(k, num_streams)
        bits_amplitudes = 0

    return FeedbackReport(
        angle_indices=indices,
        combining=combining,
        k=k,
        gamma=gamma,
        bits_angles=k * abits,
        bits_amplitudes=bits_amplitudes,
        magnitude_scale=scale,
    )
