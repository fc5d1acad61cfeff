"""Command-line experiment harness.

Subcommands: rate, ber, beam-pattern, overhead. Settings come from a YAML
config file merged over built-in defaults; --seed/--trials/--out/--workers
override config keys. Exit codes: 0 success, 1 config error, 2 numeric
failure.
"""

import argparse
import copy
import sys

import numpy as np
import yaml

from .channel import ArrayGeometry, ChannelConfig
from .errors import DomainError, InvalidInputError
from .feedback import ComplexCodebook
from .runner import (BeamPatternConfig, ExperimentConfig, MultilevelScheme, OptimalScheme,
                     ProposedScheme, SparseScheme, run_beam_pattern, run_ber_sweep,
                     run_overhead_table, run_rate_sweep)

DEFAULT_CONFIG = {
    "channel": {
        "tx_antennas": 128,
        "rx_antennas": 16,
        "spacing_over_wavelength": 0.5,
        "clusters": 12,
        "rays_per_cluster": 20,
        "tx_sector_deg": [-45.0, 45.0],
        "rx_sector_deg": [-180.0, 180.0],
        "angular_spread_deg": 0.875,
    },
    "streams": 4,
    "allocation": "unitary",
    "snr_db": {"start": -20.0, "stop": 10.0, "step": 2.5},
    "trials": 200,
    "symbols_per_trial": 1000,
    "seed": 20250809,
    "schemes": [
        {"type": "optimal"},
        {"type": "proposed", "k": 6, "gamma": 1, "angle_codebook_size": 256},
        {"type": "proposed", "k": 8, "gamma": 1, "angle_codebook_size": 256},
        {"type": "proposed", "k": 16, "gamma": 1, "angle_codebook_size": 256},
        {"type": "sparse", "q": 8, "angle_codebook_size": 256},
        {"type": "multilevel", "k": 16, "angle_codebook_size": 256},
    ],
    "beam_pattern": {
        "sector_deg": [-30.0, 30.0],
        "codebook_size": 16,
        "center_index": 8,
        "grid_size": 2048,
        "gammas": [1, 2, 4],
    },
}


def _merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path=None):
    """Built-in defaults, optionally merged with a YAML file."""
    raw = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            user = yaml.safe_load(fh)
        if user is None:
            user = {}
        if not isinstance(user, dict):
            raise InvalidInputError("config: top level must be a mapping")
        raw = _merge(raw, user)
    return raw


def _get(tree, path, kind):
    node = tree
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise InvalidInputError(f"{path}: missing required key")
        node = node[part]
    if kind is float and isinstance(node, int):
        node = float(node)
    if not isinstance(node, kind) or isinstance(node, bool):
        raise InvalidInputError(f"{path}: expected {kind.__name__}, got {node!r}")
    return node


def _sector(tree, path):
    value = _get(tree, path, list)
    if len(value) != 2:
        raise InvalidInputError(f"{path}: expected [lo_deg, hi_deg]")
    return tuple(np.deg2rad(float(v)) for v in value)


def _coeff_codebook(node, where):
    if node is None or node == "ideal":
        return ComplexCodebook.ideal()
    if isinstance(node, dict):
        try:
            return ComplexCodebook.uniform_polar(
                magnitude_levels=int(node["magnitude_levels"]),
                phase_levels=int(node["phase_levels"]),
            )
        except KeyError as exc:
            raise InvalidInputError(f"{where}.coeff_codebook: missing {exc.args[0]}") from None
    raise InvalidInputError(f"{where}.coeff_codebook: expected 'ideal' or a level mapping")


def _scheme(node, index):
    where = f"schemes[{index}]"
    if not isinstance(node, dict) or "type" not in node:
        raise InvalidInputError(f"{where}: expected a mapping with a 'type' key")
    kind = node["type"]
    try:
        if kind == "optimal":
            return OptimalScheme()
        if kind == "proposed":
            return ProposedScheme(
                k=int(node["k"]),
                gamma=int(node.get("gamma", 1)),
                angle_codebook_size=int(node.get("angle_codebook_size", 256)),
                coeff_codebook=_coeff_codebook(node.get("coeff_codebook"), where),
            )
        if kind == "sparse":
            return SparseScheme(
                q=int(node["q"]),
                angle_codebook_size=int(node.get("angle_codebook_size", 256)),
            )
        if kind == "multilevel":
            return MultilevelScheme(
                k=int(node["k"]),
                angle_codebook_size=int(node.get("angle_codebook_size", 256)),
                coeff_codebook=_coeff_codebook(node.get("coeff_codebook"), where),
            )
    except KeyError as exc:
        raise InvalidInputError(f"{where}.{exc.args[0]}: missing required key") from None
    raise InvalidInputError(f"{where}.type: unknown scheme type {kind!r}")


def _snr_grid(tree):
    node = tree["snr_db"]
    if isinstance(node, list):
        if not node:
            raise InvalidInputError("snr_db: must be non-empty")
        return tuple(float(v) for v in node)
    if isinstance(node, dict):
        start = _get(tree, "snr_db.start", float)
        stop = _get(tree, "snr_db.stop", float)
        step = _get(tree, "snr_db.step", float)
        if step <= 0 or stop < start:
            raise InvalidInputError("snr_db: requires step > 0 and stop >= start")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(count))
    raise InvalidInputError("snr_db: expected a list or {start, stop, step}")


def build_experiment_config(raw):
    """Validate a raw config tree and build the typed experiment config."""
    channel = ChannelConfig(
        tx=ArrayGeometry(
            num_elements=_get(raw, "channel.tx_antennas", int),
            spacing_over_wavelength=_get(raw, "channel.spacing_over_wavelength", float),
        ),
        rx=ArrayGeometry(
            num_elements=_get(raw, "channel.rx_antennas", int),
            spacing_over_wavelength=_get(raw, "channel.spacing_over_wavelength", float),
        ),
        num_clusters=_get(raw, "channel.clusters", int),
        rays_per_cluster=_get(raw, "channel.rays_per_cluster", int),
        tx_sector=_sector(raw, "channel.tx_sector_deg"),
        rx_sector=_sector(raw, "channel.rx_sector_deg"),
        angular_spread=float(np.deg2rad(_get(raw, "channel.angular_spread_deg", float))),
    )
    schemes = tuple(_scheme(node, i) for i, node in enumerate(_get(raw, "schemes", list)))
    bp = raw.get("beam_pattern", {})
    beam = BeamPatternConfig(
        sector=_sector(raw, "beam_pattern.sector_deg"),
        codebook_size=_get(raw, "beam_pattern.codebook_size", int),
        center_index=_get(raw, "beam_pattern.center_index", int),
        grid_size=_get(raw, "beam_pattern.grid_size", int),
        gammas=tuple(int(g) for g in _get(raw, "beam_pattern.gammas", list)),
    ) if bp else BeamPatternConfig()
    return ExperimentConfig(
        channel=channel,
        streams=_get(raw, "streams", int),
        schemes=schemes,
        snr_db_grid=_snr_grid(raw),
        trials=_get(raw, "trials", int),
        symbols_per_trial=_get(raw, "symbols_per_trial", int),
        seed=_get(raw, "seed", int),
        allocation=_get(raw, "allocation", str),
        beam_pattern=beam,
    )


def _add_common(parser):
    parser.add_argument("--config", help="YAML config file merged over the defaults")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--trials", type=int, help="override the config trial count")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel trial workers (default 1; results are identical)")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fapsim",
        description="Feedback-aware hybrid precoding Monte-Carlo experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in [
        ("rate", "achievable-rate sweep over SNR"),
        ("ber", "uncoded QPSK BER sweep over SNR"),
        ("beam-pattern", "beam-pattern profile per gamma"),
        ("overhead", "feedback-bit table per scheme"),
    ]:
        p = sub.add_parser(name, help=descr)
        _add_common(p)
        if name == "beam-pattern":
            p.add_argument("--gammas", help="comma-separated gamma list, e.g. 1,2,4")
    args = parser.parse_args(argv)

    try:
        raw = load_config(args.config)
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.trials is not None:
            raw["trials"] = args.trials
        cfg = build_experiment_config(raw)

        if args.command == "rate":
            csv_text = run_rate_sweep(cfg, workers=args.workers)
        elif args.command == "ber":
            csv_text = run_ber_sweep(cfg, workers=args.workers)
        elif args.command == "beam-pattern":
            gammas = None
            if args.gammas:
                gammas = tuple(int(g) for g in args.gammas.split(","))
            csv_text = run_beam_pattern(cfg, gamma_list=gammas)
        else:
            csv_text = run_overhead_table(cfg)
    except (InvalidInputError, OSError, yaml.YAMLError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
