"""Monte-Carlo experiment runner.

Each trial owns an independent random sub-stream derived from (seed, trial),
so results are identical for any worker count; per-trial values land in a
trial-indexed buffer and are reduced serially. All sweeps emit CSV text with
the resolved configuration embedded in '#' comment lines.
"""

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import MultilevelCsiConfig, SparsePrecoderConfig, multilevel_csi_feedback, sparse_precoder
from .channel import ChannelConfig, sample_channel, substream
from .errors import InvalidInputError
from .evaluation import LinkMetrics, achievable_rate, beam_pattern, ber_qpsk_mmse
from .feedback import AngleCodebook, BasisSpec, ComplexCodebook, build_report, reconstruct_precoder
from .precoding import PowerAllocation, optimal_precoder


@dataclass(frozen=True)
class OptimalScheme:
    """Upper bound: optimal precoder from exact CSI, no feedback constraint."""

    @property
    def label(self):
        return "optimal"


@dataclass(frozen=True)
class ProposedScheme:
    k: int
    gamma: int = 1
    angle_codebook_size: int = 256
    coeff_codebook: ComplexCodebook = field(default_factory=ComplexCodebook.ideal)

    @property
    def label(self):
        return f"proposed_k{self.k}_g{self.gamma}_cb{self.angle_codebook_size}"


@dataclass(frozen=True)
class SparseScheme:
    q: int
    angle_codebook_size: int = 256

    @property
    def label(self):
        return f"sparse_q{self.q}_cb{self.angle_codebook_size}"


@dataclass(frozen=True)
class MultilevelScheme:
    k: int
    angle_codebook_size: int = 256
    coeff_codebook: ComplexCodebook = field(default_factory=ComplexCodebook.ideal)

    @property
    def label(self):
        return f"multilevel_k{self.k}_cb{self.angle_codebook_size}"


@dataclass(frozen=True)
class BeamPatternConfig:
    sector: tuple = (-np.pi / 6, np.pi / 6)
    codebook_size: int = 16
    center_index: int = 8
    grid_size: int = 2048
    gammas: tuple = (1, 2, 4)


@dataclass(frozen=True)
class ExperimentConfig:
    channel: ChannelConfig
    streams: int
    schemes: tuple
    snr_db_grid: tuple
    trials: int
    symbols_per_trial: int
    seed: int
    allocation: str = "unitary"
    beam_pattern: BeamPatternConfig = field(default_factory=BeamPatternConfig)

    def __post_init__(self):
        if self.streams < 1 or self.streams > min(self.channel.tx.num_elements,
                                                  self.channel.rx.num_elements):
            raise InvalidInputError("streams: must be in [1, min(tx, rx antennas)]")
        if len(self.snr_db_grid) == 0:
            raise InvalidInputError("snr_db_grid: must be non-empty")
        if self.trials < 1:
            raise InvalidInputError("trials: must be >= 1")
        if self.symbols_per_trial < 1:
            raise InvalidInputError("symbols_per_trial: must be >= 1")
        if self.allocation not in ("unitary", "water_filling"):
            raise InvalidInputError("allocation: must be 'unitary' or 'water_filling'")
        if len(self.schemes) == 0:
            raise InvalidInputError("schemes: must be non-empty")
        labels = [s.label for s in self.schemes]
        if len(set(labels)) != len(labels):
            raise InvalidInputError("schemes: labels must be unique")
        for i, scheme in enumerate(self.schemes):
            self._check_scheme(i, scheme)

    def _check_scheme(self, i, scheme):
        where = f"schemes[{i}]"
        if isinstance(scheme, OptimalScheme):
            return
        if isinstance(scheme, ProposedScheme):
            if not 1 <= scheme.k <= scheme.angle_codebook_size:
                raise InvalidInputError(f"{where}.k: must be in [1, angle_codebook_size]")
        elif isinstance(scheme, SparseScheme):
            if scheme.q < self.streams:
                raise InvalidInputError(f"{where}.q: must be >= streams")
            if scheme.q > scheme.angle_codebook_size:
                raise InvalidInputError(f"{where}.q: must be <= angle_codebook_size")
        elif isinstance(scheme, MultilevelScheme):
            if not 1 <= scheme.k <= self.channel.num_paths:
                raise InvalidInputError(f"{where}.k: must be in [1, clusters*rays_per_cluster]")
        else:
            raise InvalidInputError(f"{where}: unknown scheme type {type(scheme).__name__}")


def scheme_overhead(scheme, cfg):
    """Nominal (angle_bits, amplitude_bits) of one configured scheme.

    Ideal amplitude feedback is counted as zero bits.
    """
    s = cfg.streams
    if isinstance(scheme, OptimalScheme):
        return 0, 0
    if isinstance(scheme, ProposedScheme):
        abits = scheme.k * AngleCodebook(cfg.channel.tx_sector, scheme.angle_codebook_size).index_bits
        return abits, scheme.k * s * scheme.coeff_codebook.bits_per_value
    if isinstance(scheme, SparseScheme):
        abits = scheme.q * AngleCodebook(cfg.channel.tx_sector, scheme.angle_codebook_size).index_bits
        return abits, 0
    if isinstance(scheme, MultilevelScheme):
        abits = 2 * scheme.k * AngleCodebook(cfg.channel.tx_sector, scheme.angle_codebook_size).index_bits
        return abits, scheme.k * scheme.coeff_codebook.bits_per_value
    raise InvalidInputError(f"unknown scheme type {type(scheme).__name__}")


def _build_precoder(scheme, ch, cfg, alloc):
    """Unit-norm M x S precoding matrix for one scheme on one channel draw."""
    if isinstance(scheme, OptimalScheme):
        return optimal_precoder(ch.matrix, cfg.streams, alloc).matrix
    if isinstance(scheme, ProposedScheme):
        f_opt = optimal_precoder(ch.matrix, cfg.streams, alloc)
        spec = BasisSpec(
            codebook=AngleCodebook(cfg.channel.tx_sector, scheme.angle_codebook_size),
            tx=cfg.channel.tx,
            gamma=scheme.gamma,
        )
        report = build_report(f_opt, spec, scheme.k, scheme.coeff_codebook)
        return reconstruct_precoder(report, spec).matrix
    if isinstance(scheme, SparseScheme):
        f_opt = optimal_precoder(ch.matrix, cfg.streams, alloc)
        bench = SparsePrecoderConfig(
            num_rf_chains=scheme.q,
            codebook=AngleCodebook(cfg.channel.tx_sector, scheme.angle_codebook_size),
            tx=cfg.channel.tx,
        )
        f_rf, f_bb = sparse_precoder(f_opt, bench)
        f = f_rf @ f_bb
        return f / np.linalg.norm(f)
    if isinstance(scheme, MultilevelScheme):
        bench = MultilevelCsiConfig(
            num_paths=scheme.k,
            aod_codebook=AngleCodebook(cfg.channel.tx_sector, scheme.angle_codebook_size),
            aoa_codebook=AngleCodebook(cfg.channel.rx_sector, scheme.angle_codebook_size),
            coeff_codebook=scheme.coeff_codebook,
            tx=cfg.channel.tx,
            rx=cfg.channel.rx,
        )
        h_hat = multilevel_csi_feedback(ch, bench)
        return optimal_precoder(h_hat, cfg.streams, alloc).matrix
    raise InvalidInputError(f"unknown scheme type {type(scheme).__name__}")


def _precoder_per_snr(scheme, ch, cfg):
    """Map snr -> precoder; with unitary allocation the precoder is SNR-independent."""
    if cfg.allocation == "unitary":
        cached = _build_precoder(scheme, ch, cfg, PowerAllocation("unitary"))
        return lambda snr: cached
    return lambda snr: _build_precoder(
        scheme, ch, cfg, PowerAllocation("water_filling", total_power=snr)
    )


def _rate_trial(cfg, trial):
    rng = substream(cfg.seed, trial)
    ch = sample_channel(cfg.channel, rng)
    out = np.empty((len(cfg.schemes), len(cfg.snr_db_grid)))
    for i, scheme in enumerate(cfg.schemes):
        precoder = _precoder_per_snr(scheme, ch, cfg)
        for j, snr_db in enumerate(cfg.snr_db_grid):
            snr = 10.0 ** (snr_db / 10.0)
            out[i, j] = achievable_rate(ch.matrix, precoder(snr), snr)
    return out


def _ber_trial(cfg, trial):
    rng = substream(cfg.seed, trial)
    ch = sample_channel(cfg.channel, rng)
    precoders = [_precoder_per_snr(s, ch, cfg) for s in cfg.schemes]
    errors = np.zeros((len(cfg.schemes), len(cfg.snr_db_grid)), dtype=np.int64)
    sent = np.zeros_like(errors)
    for j, snr_db in enumerate(cfg.snr_db_grid):
        snr = 10.0 ** (snr_db / 10.0)
        for i, precoder in enumerate(precoders):
            # One noise/symbol stream per (trial, snr), re-created per scheme:
            # every scheme sees the same bits and noise, pairing the comparison.
            noise_rng = substream(cfg.seed, trial, j)
            e, b = ber_qpsk_mmse(ch.matrix, precoder(snr), snr, cfg.symbols_per_trial, noise_rng)
            errors[i, j] = e
            sent[i, j] = b
    return errors, sent


def _map_trials(fn, cfg, workers):
    trials = range(cfg.trials)
    if workers <= 1:
        return [fn(cfg, t) for t in trials]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, [cfg] * cfg.trials, trials))


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _csv(cfg, title, columns, rows):
    blob = dataclasses.asdict(cfg)
    for scheme, node in zip(cfg.schemes, blob["schemes"]):
        node["label"] = scheme.label
    lines = [f"# fapsim {title}"]
    lines.append("# config: " + json.dumps(blob, sort_keys=True, default=_json_default))
    lines.append(f"# seed: {cfg.seed}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def run_rate_sweep(cfg, workers=1):
    """Mean achievable rate per (scheme, SNR) over independent channel draws."""
    per_trial = np.stack(_map_trials(_rate_trial, cfg, workers))   # trials x schemes x snrs
    columns = ["scheme", "snr_db", "mean_rate", "stderr",
               "feedback_angle_bits", "feedback_amplitude_bits"]
    rows = []
    for i, scheme in enumerate(cfg.schemes):
        abits, cbits = scheme_overhead(scheme, cfg)
        for j, snr_db in enumerate(cfg.snr_db_grid):
            values = per_trial[:, i, j]
            mean = float(np.mean(values))
            stderr = float(np.std(values, ddof=1) / np.sqrt(cfg.trials)) if cfg.trials > 1 else 0.0
            rows.append([scheme.label, snr_db, mean, stderr, abits, cbits])
    return _csv(cfg, "rate sweep", columns, rows)


def run_ber_sweep(cfg, workers=1):
    """Uncoded QPSK BER per (scheme, SNR); bit errors accumulate across trials."""
    results = _map_trials(_ber_trial, cfg, workers)
    errors = np.zeros((len(cfg.schemes), len(cfg.snr_db_grid)), dtype=np.int64)
    sent = np.zeros_like(errors)
    for e, b in results:                       # integer sums, order-independent
        errors += e
        sent += b
    columns = ["scheme", "snr_db", "ber", "stderr", "bit_errors", "bits_sent",
               "feedback_angle_bits", "feedback_amplitude_bits"]
    rows = []
    for i, scheme in enumerate(cfg.schemes):
        abits, cbits = scheme_overhead(scheme, cfg)
        for j, snr_db in enumerate(cfg.snr_db_grid):
            metrics = LinkMetrics(
                snr_db=float(snr_db),
                rate_bps_hz=0.0,
                ber=float(errors[i, j] / sent[i, j]),
                trials=cfg.trials,
                bit_errors=int(errors[i, j]),
                bits_sent=int(sent[i, j]),
            )
            stderr = float(np.sqrt(metrics.ber * (1.0 - metrics.ber) / metrics.bits_sent))
            rows.append([scheme.label, snr_db, metrics.ber, stderr,
                         metrics.bit_errors, metrics.bits_sent, abits, cbits])
    return _csv(cfg, "ber sweep", columns, rows)


def run_beam_pattern(cfg, gamma_list=None):
    """Normalized beam-pattern profile of one codebook element, one column per gamma."""
    bp = cfg.beam_pattern
    gammas = tuple(gamma_list) if gamma_list is not None else bp.gammas
    codebook = AngleCodebook(bp.sector, bp.codebook_size)
    patterns = []
    for gamma in gammas:
        spec = BasisSpec(codebook=codebook, tx=cfg.channel.tx, gamma=gamma)
        patterns.append(beam_pattern(spec, bp.center_index, bp.grid_size))
    columns = ["angle_rad"] + [f"g_gamma{g}" for g in gammas]
    rows = []
    for idx in range(bp.grid_size):
        rows.append([patterns[0].angles[idx]] + [p.gain[idx] for p in patterns])
    return _csv(cfg, "beam pattern", columns, rows)


def run_overhead_table(cfg):
    """Feedback-bit budget of every configured scheme."""
    columns = ["scheme", "angle_bits", "amplitude_bits", "total_bits"]
    rows = []
    for scheme in cfg.schemes:
        abits, cbits = scheme_overhead(scheme, cfg)
        rows.append([scheme.label, abits, cbits, abits + cbits])
    return _csv(cfg, "overhead table", columns, rows)
