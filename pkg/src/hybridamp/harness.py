"""Seeded Monte Carlo sweeps over the transmit array size.

Each (n_tx, realization) pair gets its own 64-bit sub-seed derived from the
master seed (see ``sub_seed``), so any single realization can be re-run in
isolation and the report is a pure function of the configuration.
"""

import csv
import enum
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Tuple

import numpy as np

from .channel import SystemConfig, draw_channel
from .core import NumericalError, Scheme, achievable_rate, decompose, fully_digital_baseline
from .schemes import PhaseShifterDesignParams, build_scheme_a, build_scheme_b, build_scheme_c

logger = logging.getLogger(__name__)

__all__ = [
    "ChannelMode",
    "ConfigError",
    "ExperimentError",
    "ExperimentConfig",
    "ExperimentReport",
    "Failure",
    "SUB_SEED_RULE",
    "sub_seed",
    "noise_variance",
    "evaluate_realization",
    "run_experiment",
    "write_report",
    "read_summary",
    "read_realizations",
    "parse_config",
    "load_config",
    "format_config",
    "figure2_config",
]

SOFTWARE_VERSION = "hybridamp 0.1.0"
SUMMARY_HEADER = ["scheme", "n_tx", "mean_se_bps_hz", "std_se", "n_samples"]
REALIZATION_HEADER = ["scheme", "n_tx", "realization", "sub_seed", "se_bps_hz"]
MAX_EXCLUDED_FRACTION = 0.05

SUB_SEED_RULE = (
    "sub_seed = numpy.random.SeedSequence(entropy=master_seed, "
    "spawn_key=(n_tx, realization)).generate_state(1, uint64)[0]; "
    "n_tx is replaced by 0 when common_random_numbers is true"
)

SCHEME_ORDER = (
    Scheme.FULLY_DIGITAL,
    Scheme.RF_CHAIN_AMPS,
    Scheme.ANTENNA_AMPS,
    Scheme.PHASE_SHIFTER_AMPS,
)


class ChannelMode(str, enum.Enum):
    FULL_RANK = "full_rank"
    RANK_DEFICIENT = "rank_deficient"


class ConfigError(ValueError):
    """An experiment configuration violates one of its invariants."""


class ExperimentError(RuntimeError):
    """Too many realizations had to be excluded from a sweep cell."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment report.

    ``path_gain_power`` is the mean power ``E|alpha|^2`` of a path gain that
    the SNR is referenced to. Channels are always drawn with unit-power
    gains; the noise variance is divided by this factor instead, which
    leaves every rate unchanged relative to drawing stronger gains. The
    default of 2 corresponds to path gains with unit-variance real and
    imaginary parts.
    """

    n_rx_antennas: int = 8
    n_rf: int = 2
    n_streams: int = 2
    n_paths: int = 15
    snr_db: float = -5.0
    n_realizations: int = 100
    master_seed: int = 0
    channel_mode: ChannelMode = ChannelMode.FULL_RANK
    schemes: Tuple[Scheme, ...] = SCHEME_ORDER
    sweep_n_tx: Tuple[int, ...] = tuple(range(3, 40, 2))
    common_random_numbers: bool = False
    path_gain_power: float = 2.0
    p_max: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "channel_mode", ChannelMode(self.channel_mode))
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))
        object.__setattr__(self, "sweep_n_tx", tuple(int(n) for n in self.sweep_n_tx))

    def validate(self):
        """Raise ConfigError naming the first violated invariant."""
        for name in ("n_rx_antennas", "n_rf", "n_streams", "n_paths", "n_realizations"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError(f"{name}: must be a positive integer, got {value!r}")
        if not self.sweep_n_tx:
            raise ConfigError("sweep_n_tx: must be nonempty")
        low = [n for n in self.sweep_n_tx if n < self.n_streams]
        if low:
            raise ConfigError(
                f"sweep_n_tx: every value must be >= n_streams ({self.n_streams}), got {low}"
            )
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed: must be an unsigned 64-bit integer")
        if not math.isfinite(self.snr_db):
            raise ConfigError("snr_db: must be finite")
        if not self.path_gain_power > 0 or not self.p_max > 0:
            raise ConfigError("path_gain_power and p_max: must be positive")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("schemes: duplicate entries")
        try:
            for n_tx in self.sweep_n_tx:
                self.system_config(n_tx)
        except ValueError as exc:
            raise ConfigError(f"system: {exc}") from exc

    @property
    def noise_var(self):
        return noise_variance(self.snr_db, self.p_max, self.path_gain_power)

    def system_config(self, n_tx):
        return SystemConfig(
            n_tx_antennas=n_tx,
            n_rx_antennas=self.n_rx_antennas,
            n_rf_tx=self.n_rf,
            n_rf_rx=self.n_rf,
            n_streams=self.n_streams,
            p_max=self.p_max,
            noise_var=self.noise_var,
            n_paths=self.n_paths,
        )


def noise_variance(snr_db, p_max=1.0, path_gain_power=1.0):
    """Noise variance for ``SNR = p_max * path_gain_power / noise_var``."""
    return p_max * 10.0 ** (-snr_db / 10.0) / path_gain_power


def sub_seed(master_seed, n_tx, realization):
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(n_tx, realization))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Failure:
    scheme: Scheme
    n_tx: int
    realization: int
    sub_seed: int
    message: str


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    samples: Dict[Tuple[Scheme, int], List[Tuple[int, int, float]]] = field(default_factory=dict)
    failures: List[Failure] = field(default_factory=list)
    version: str = SOFTWARE_VERSION
    sub_seed_rule: str = SUB_SEED_RULE

    def values(self, scheme, n_tx):
        return np.array([se for _, _, se in self.samples[(Scheme(scheme), n_tx)]])

    def mean(self, scheme, n_tx):
        return float(np.mean(self.values(scheme, n_tx)))

    def summary_rows(self):
        """(scheme, n_tx, mean, sample std, count) per cell, schemes in canonical order."""
        rows = []
        for scheme in _ordered(self.config.schemes):
            for n_tx in self.config.sweep_n_tx:
                v = self.values(scheme, n_tx)
                std = float(np.std(v, ddof=1)) if len(v) > 1 else 0.0
                rows.append((scheme, n_tx, float(np.mean(v)), std, len(v)))
        return rows

    def provenance(self):
        return {
            "master_seed": self.config.master_seed,
            "sub_seed_rule": self.sub_seed_rule,
            "software_version": self.version,
            "config": format_config(self.config),
            "excluded": [
                {**asdict(f), "scheme": f.scheme.value} for f in self.failures
            ],
        }


def _ordered(schemes):
    return [s for s in SCHEME_ORDER if s in schemes]


def evaluate_realization(config, n_tx, realization, params=None):
    """Spectral efficiency of every requested scheme on one channel draw.

    Returns
    -------
    seed : int
        The realization's sub-seed.
    results : dict
        Scheme -> SE in bits/s/Hz, or the error message if construction or
        rate evaluation failed.
    """
    params = params or PhaseShifterDesignParams()
    seed = sub_seed(config.master_seed, 0 if config.common_random_numbers else n_tx, realization)
    channel_seq, seq_a, seq_b = np.random.SeedSequence(seed).spawn(3)
    system = config.system_config(n_tx)
    rank_deficient = config.channel_mode is ChannelMode.RANK_DEFICIENT
    h = draw_channel(system, np.random.default_rng(channel_seq), rank_deficient).h

    results = {}
    decomp = decompose(h, config.n_rf)
    for scheme in _ordered(config.schemes):
        try:
            if scheme is Scheme.FULLY_DIGITAL:
                precoder, postcoder, _ = fully_digital_baseline(decomp, system)
            elif scheme is Scheme.RF_CHAIN_AMPS:
                precoder, postcoder = build_scheme_a(h, decomp, system, params, np.random.default_rng(seq_a))
            elif scheme is Scheme.ANTENNA_AMPS:
                precoder, postcoder = build_scheme_b(h, decomp, system, params, np.random.default_rng(seq_b))
            else:
                precoder, postcoder = build_scheme_c(decomp, system)
            results[scheme] = achievable_rate(h, precoder.matrix, postcoder.matrix, system.noise_var)
        except (NumericalError, ValueError, np.linalg.LinAlgError) as exc:
            results[scheme] = f"{type(exc).__name__}: {exc}"
    return seed, results


def _run_sweep_point(config, n_tx):
    return n_tx, [evaluate_realization(config, n_tx, r) for r in range(config.n_realizations)]


def run_experiment(config, workers=1):
    """Run the full sweep and collect per-cell samples.

    Realizations whose construction fails are left out of the affected
    cell and listed in ``report.failures``.

    Raises
    ------
    ConfigError
        If the configuration is invalid.
    ExperimentError
        If more than 5% of the realizations of any cell were excluded.
    """
    config.validate()
    report = ExperimentReport(config=config)
    for scheme in config.schemes:
        for n_tx in config.sweep_n_tx:
            report.samples[(scheme, n_tx)] = []

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_run_sweep_point, [config] * len(config.sweep_n_tx), config.sweep_n_tx))
    else:
        points = [_run_sweep_point(config, n_tx) for n_tx in config.sweep_n_tx]

    for n_tx, realizations in points:
        for r, (seed, results) in enumerate(realizations):
            for scheme, value in results.items():
                if isinstance(value, str):
                    report.failures.append(Failure(scheme, n_tx, r, seed, value))
                    logger.warning("excluded %s n_tx=%d realization=%d: %s", scheme.value, n_tx, r, value)
                else:
                    report.samples[(scheme, n_tx)].append((r, seed, value))

    limit = MAX_EXCLUDED_FRACTION * config.n_realizations
    for (scheme, n_tx), samples in report.samples.items():
        excluded = config.n_realizations - len(samples)
        if excluded > limit:
            raise ExperimentError(
                f"{scheme.value} at n_tx={n_tx}: {excluded} of {config.n_realizations} "
                "realizations excluded (limit 5%)"
            )
    return report


def _fmt(x):
    return f"{x:.12g}"


def write_report(report, out_dir, per_realization=False):
    """Write ``summary.csv``, ``provenance.json`` and optionally ``realizations.csv``.

    Returns the list of written paths.
    """
    written = []
    try:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "summary.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SUMMARY_HEADER)
            for scheme, n_tx, mean, std, count in report.summary_rows():
                writer.writerow([scheme.value, n_tx, _fmt(mean), _fmt(std), count])
        written.append(path)

        if per_realization:
            path = os.path.join(out_dir, "realizations.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(REALIZATION_HEADER)
                for scheme in _ordered(report.config.schemes):
                    for n_tx in report.config.sweep_n_tx:
                        for r, seed, se in report.samples[(scheme, n_tx)]:
                            writer.writerow([scheme.value, n_tx, r, seed, _fmt(se)])
            written.append(path)

        path = os.path.join(out_dir, "provenance.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report.provenance(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    except OSError as exc:
        raise OSError(f"cannot write report to {out_dir!r}: {exc}") from exc
    return written


def read_summary(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return [
            {
                "scheme": row["scheme"],
                "n_tx": int(row["n_tx"]),
                "mean_se_bps_hz": float(row["mean_se_bps_hz"]),
                "std_se": float(row["std_se"]),
                "n_samples": int(row["n_samples"]),
            }
            for row in csv.DictReader(fh)
        ]


def read_realizations(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return [
            {
                "scheme": row["scheme"],
                "n_tx": int(row["n_tx"]),
                "realization": int(row["realization"]),
                "sub_seed": int(row["sub_seed"]),
                "se_bps_hz": float(row["se_bps_hz"]),
            }
            for row in csv.DictReader(fh)
        ]


# Config file: one ``key = value`` per line, ``#`` starts a comment.
_INT_KEYS = ("n_rx_antennas", "n_rf", "n_streams", "n_paths", "n_realizations", "master_seed")
_FLOAT_KEYS = ("snr_db", "path_gain_power", "p_max")


def _parse_bool(text):
    if text not in ("true", "false"):
        raise ValueError(f"expected true or false, got {text!r}")
    return text == "true"


def parse_config(text):
    """Parse the flat key-value config format into an ExperimentConfig.

    Missing keys keep their defaults. Unknown keys and malformed values
    raise ConfigError. The result is not validated.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == "channel_mode":
                values[key] = ChannelMode(value)
            elif key == "schemes":
                values[key] = tuple(Scheme(s.strip()) for s in value.split(",") if s.strip())
            elif key == "sweep_n_tx":
                values[key] = tuple(int(s) for s in value.split(",") if s.strip())
            elif key == "common_random_numbers":
                values[key] = _parse_bool(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return ExperimentConfig(**values)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text)


def format_config(config):
    lines = [
        f"n_rx_antennas = {config.n_rx_antennas}",
        f"n_rf = {config.n_rf}",
        f"n_streams = {config.n_streams}",
        f"n_paths = {config.n_paths}",
        f"snr_db = {config.snr_db!r}",
        f"n_realizations = {config.n_realizations}",
        f"master_seed = {config.master_seed}",
        f"channel_mode = {config.channel_mode.value}",
        f"schemes = {','.join(s.value for s in config.schemes)}",
        f"sweep_n_tx = {','.join(str(n) for n in config.sweep_n_tx)}",
        f"common_random_numbers = {'true' if config.common_random_numbers else 'false'}",
        f"path_gain_power = {config.path_gain_power!r}",
        f"p_max = {config.p_max!r}",
    ]
    return "\n".join(lines) + "\n"


def figure2_config(variant, **overrides):
    """Built-in preset: M=8, two RF chains and streams, 15 paths, -5 dB, N = 3..39 odd.

    ``variant`` ``"a"`` uses the full-rank channel, ``"b"`` the channel whose
    rank equals the RF-chain count.
    """
    modes = {"a": ChannelMode.FULL_RANK, "b": ChannelMode.RANK_DEFICIENT}
    if variant not in modes:
        raise ConfigError(f"variant must be 'a' or 'b', got {variant!r}")
    return replace(ExperimentConfig(channel_mode=modes[variant]), **overrides)
