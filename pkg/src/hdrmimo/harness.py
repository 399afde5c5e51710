"""Experiment orchestration: method pipelines, seeded Monte Carlo sweeps,
config parsing, CSV output, and plot-script emission."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import (
    ScenarioConfig,
    noise_variance_from_msnr,
    observe,
    realize_channel,
)
from .equalizer import (
    build_lmmse,
    build_unquantized_lmmse,
    count_bit_errors,
    equalize,
    hard_slice,
    modulate,
)
from .frontend import (
    adc,
    apply_transform,
    compute_agc,
    design_hr_iso,
    design_hr_max,
    design_quantizer,
    identity_transform,
)
from .training import (
    estimate_from_training,
    generate_pilots,
    sample_covariance,
    simulate_training,
)

METHODS = ("perfect", "wsu", "none", "hr-iso", "hr-max")

CSV_HEADER = "method,rho_db,q,C,B,U,msnr_db,bit_errors,total_bits,ber,realizations,seed"

# Keeps the fixed-point MSNR encoding nonnegative for SeedSequence.
_MSNR_KEY_OFFSET = 1 << 40


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one BER sweep (scenario, methods, grid, budget)."""

    bs_antennas: int = 256
    ues: int = 32
    clusters: int = 32
    q_bits: int = 3
    rho_db: float = 30.0
    dr_limit_db: float = 6.0
    paths: int = 5
    angle_sector_deg: float = 60.0
    path_decay_db: float = 5.0
    shadowing_std_db: float = 8.0
    methods: tuple = METHODS
    msnr_start: float = -10.0
    msnr_stop: float = 15.0
    msnr_step: float = 2.5
    realizations: int = 100
    symbols: int = 200
    seed: int = 1
    out: str = "results.csv"
    plot_script: Optional[str] = None
    threads: int = 1
    quantized_training: bool = False

    def __post_init__(self) -> None:
        self.scenario()  # validates the geometry/power-control fields
        if not 1 <= self.q_bits <= 12:
            raise ValueError(f"q_bits must be in 1..12, got {self.q_bits}")
        if not self.methods:
            raise ValueError("methods list must be nonempty")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(
                    f"unknown method '{m}'; choose from {', '.join(METHODS)}"
                )
        if self.msnr_step <= 0:
            raise ValueError(f"msnr_step must be positive, got {self.msnr_step}")
        if self.msnr_stop < self.msnr_start:
            raise ValueError("msnr_stop must be >= msnr_start")
        if self.realizations < 1 or self.symbols < 1:
            raise ValueError("realizations and symbols must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def scenario(self) -> ScenarioConfig:
        return ScenarioConfig(
            bs_antennas=self.bs_antennas,
            ues=self.ues,
            clusters=self.clusters,
            rho_db=self.rho_db,
            dr_limit_db=self.dr_limit_db,
            paths=self.paths,
            angle_sector_deg=self.angle_sector_deg,
            path_decay_db=self.path_decay_db,
            shadowing_std_db=self.shadowing_std_db,
        )

    def msnr_grid(self) -> tuple:
        n = int(np.floor((self.msnr_stop - self.msnr_start) / self.msnr_step + 1e-9))
        return tuple(self.msnr_start + i * self.msnr_step for i in range(n + 1))

    def pilot_length(self) -> int:
        # Shortest power-of-two pilot block covering all users (K = U when
        # the user count is itself a power of two).
        return 1 << (self.ues - 1).bit_length()


@dataclass(frozen=True)
class ResultRecord:
    """One (method, scenario, MSNR point) row of aggregated BER results."""

    method: str
    rho_db: float
    q: int
    clusters: int
    bs_antennas: int
    ues: int
    msnr_db: float
    bit_errors: int
    total_bits: int
    ber: float
    realizations: int
    seed: int


def trial_rng(
    seed: int, method: str, msnr_db: float, realization_index: int
) -> np.random.Generator:
    """Deterministic per-trial RNG substream.

    The stream key is (master seed, method index, fixed-point MSNR,
    realization index), so no two trials share a stream and results are
    independent of scheduling order and thread count.
    """
    key = (
        seed,
        METHODS.index(method),
        int(round(msnr_db * 1e6)) + _MSNR_KEY_OFFSET,
        realization_index,
    )
    return np.random.default_rng(np.random.SeedSequence(key))


def _quantized_training_block(
    y_train: np.ndarray, clusters: int, q_bits: int
) -> np.ndarray:
    # Optional sensitivity-study path: pass the training block through the
    # q-bit converters (no spatial transform exists yet at training time),
    # with AGC taken from the raw block, then undo gain and Bussgang scaling.
    ident = identity_transform(y_train.shape[0], clusters)
    gains = compute_agc(sample_covariance(y_train), ident)
    quant = design_quantizer(q_bits)
    r = adc(y_train, gains, quant)
    return r / (quant.gamma * gains.omega[:, None])


def run_trial(
    cfg: ExperimentConfig,
    method: str,
    msnr_db: float,
    realization_index: int,
) -> tuple[int, int]:
    """One channel realization of one method at one MSNR point.

    Runs the full chain: channel draw with power control, training and
    estimation, transform design, AGC/quantizer setup, equalizer build, and
    a block of data symbol vectors. Returns (bit_errors, total_bits) and is
    fully deterministic given (cfg.seed, method, msnr_db, realization_index).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method '{method}'")
    scen = cfg.scenario()
    rng = trial_rng(cfg.seed, method, msnr_db, realization_index)

    realization = realize_channel(scen, rng, power_control_all=(method == "wsu"))
    noise = noise_variance_from_msnr(realization.h, msnr_db)

    pilots = generate_pilots(cfg.ues, cfg.pilot_length())
    y_train = simulate_training(realization.h, pilots, noise, rng)
    if cfg.quantized_training and method != "perfect":
        y_train = _quantized_training_block(y_train, cfg.clusters, cfg.q_bits)
    est = estimate_from_training(y_train, pilots)

    if method == "perfect":
        transform = None
        eq = build_unquantized_lmmse(est.h_hat, noise.n0)
    else:
        if method == "hr-iso":
            transform = design_hr_iso(est.h_strong, cfg.clusters)
        elif method == "hr-max":
            transform = design_hr_max(est.c_y_hat, cfg.clusters)
        else:  # wsu, none
            transform = identity_transform(cfg.bs_antennas, cfg.clusters)
        quant = design_quantizer(cfg.q_bits)
        gains = compute_agc(est.c_y_hat, transform)
        eq = build_lmmse(est.h_hat, transform, gains, quant, noise.n0)

    nbits = 4 * cfg.ues
    tx_bits = rng.integers(0, 2, size=(cfg.symbols, nbits))
    s_block = modulate(tx_bits.reshape(-1)).reshape(cfg.symbols, cfg.ues).T
    y_block = observe(realization.h, s_block, noise, rng)

    if method == "perfect":
        r_block = y_block
    else:
        y_tilde = apply_transform(transform, y_block)
        # Sampled unitarity check: the transform must conserve energy.
        n_in = float(np.linalg.norm(y_block[:, 0]))
        n_out = float(np.linalg.norm(y_tilde[:, 0]))
        if abs(n_out - n_in) > 1e-12 * max(n_in, 1.0):
            raise RuntimeError(
                f"spatial transform broke energy conservation: "
                f"||Fy|| = {n_out!r} vs ||y|| = {n_in!r}"
            )
        r_block = adc(y_tilde, gains, quant)

    s_hat = equalize(eq, r_block)
    rx_bits = hard_slice(s_hat.T.reshape(-1))
    return count_bit_errors(tx_bits.reshape(-1), rx_bits)


def run_sweep(cfg: ExperimentConfig) -> list:
    """Run methods x MSNR grid, aggregating error counts over realizations.

    Work units are independent (method, MSNR point, realization) trials;
    integer error counts are summed, so parallel execution produces records
    identical to a serial run.
    """
    grid = cfg.msnr_grid()
    tasks = [
        (method, mi, r)
        for method in cfg.methods
        for mi in range(len(grid))
        for r in range(cfg.realizations)
    ]

    def _one(task):
        method, mi, r = task
        errors, bits = run_trial(cfg, method, grid[mi], r)
        return method, mi, errors, bits

    totals: dict = {}
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(_one, tasks))
    else:
        outcomes = [_one(t) for t in tasks]
    for method, mi, errors, bits in outcomes:
        prev = totals.get((method, mi), (0, 0))
        totals[(method, mi)] = (prev[0] + errors, prev[1] + bits)

    records = []
    for method in cfg.methods:
        for mi, msnr_db in enumerate(grid):
            errors, bits = totals[(method, mi)]
            records.append(
                ResultRecord(
                    method=method,
                    rho_db=cfg.rho_db,
                    q=cfg.q_bits,
                    clusters=cfg.clusters,
                    bs_antennas=cfg.bs_antennas,
                    ues=cfg.ues,
                    msnr_db=msnr_db,
                    bit_errors=errors,
                    total_bits=bits,
                    ber=errors / bits,
                    realizations=cfg.realizations,
                    seed=cfg.seed,
                )
            )
    return records


def write_csv(records: Sequence[ResultRecord], path: str) -> None:
    """Write records with the fixed header, '.' decimals, newline-terminated."""
    if not records:
        raise ValueError("no records to write")
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.method},{r.rho_db!r},{r.q},{r.clusters},{r.bs_antennas},"
            f"{r.ues},{r.msnr_db!r},{r.bit_errors},{r.total_bits},{r.ber!r},"
            f"{r.realizations},{r.seed}"
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str) -> list:
    """Parse a results CSV back into ResultRecord rows."""
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"unrecognized results header in {path}")
    records = []
    for ln in lines[1:]:
        f = ln.split(",")
        records.append(
            ResultRecord(
                method=f[0],
                rho_db=float(f[1]),
                q=int(f[2]),
                clusters=int(f[3]),
                bs_antennas=int(f[4]),
                ues=int(f[5]),
                msnr_db=float(f[6]),
                bit_errors=int(f[7]),
                total_bits=int(f[8]),
                ber=float(f[9]),
                realizations=int(f[10]),
                seed=int(f[11]),
            )
        )
    return records


def emit_plot_script(
    records: Sequence[ResultRecord], path: str, csv_path: str = "results.csv"
) -> None:
    """Emit a standalone gnuplot script: log-BER vs MSNR, one curve per method."""
    if not records:
        raise ValueError("no records to plot")
    methods = []
    for r in records:
        if r.method not in methods:
            methods.append(r.method)
    # Columns: 1 = method, 7 = msnr_db, 10 = ber.
    clauses = [
        f"  csv using (strcol(1) eq '{m}' ? $7 : NaN):10 "
        f"with linespoints title '{m}'"
        for m in methods
    ]
    script = "\n".join(
        [
            "# Uncoded BER vs median receive SNR; run: gnuplot <this file>",
            f"csv = '{csv_path}'",
            "set datafile separator ','",
            "set datafile missing 'NaN'",
            "set logscale y",
            "set format y '10^{%T}'",
            "set xlabel 'MSNR [dB]'",
            "set ylabel 'uncoded BER'",
            "set grid",
            "set key bottom left",
            "plot \\",
            ", \\\n".join(clauses),
            "pause -1 'press enter to close'",
        ]
    )
    with open(path, "w", newline="") as fh:
        fh.write(script + "\n")


_CONFIG_SCHEMA = {
    "bs_antennas": int,
    "ues": int,
    "clusters": int,
    "q_bits": int,
    "rho_db": float,
    "dr_limit_db": float,
    "paths": int,
    "angle_sector_deg": float,
    "path_decay_db": float,
    "shadowing_std_db": float,
    "methods": "methods",
    "msnr_start": float,
    "msnr_stop": float,
    "msnr_step": float,
    "realizations": int,
    "symbols": int,
    "seed": int,
    "out": str,
    "plot_script": str,
    "threads": int,
    "quantized_training": "bool",
}


def _convert(key: str, value):
    kind = _CONFIG_SCHEMA[key]
    try:
        if kind == "methods":
            if isinstance(value, str):
                value = tuple(m.strip() for m in value.split(",") if m.strip())
            return tuple(value)
        if kind == "bool":
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad value for key '{key}': {exc}") from exc


def load_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` config file with '#' comments."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(
                    f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}"
                )
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_SCHEMA:
                raise ValueError(f"{path}:{lineno}: unknown configuration key '{key}'")
            values[key] = _convert(key, value.strip())
    return values


def parse_config(
    path: Optional[str] = None, overrides: Optional[dict] = None
) -> ExperimentConfig:
    """Build a validated config from an optional file plus overrides.

    Override values (e.g. from command-line flags) take precedence over the
    file; unset fields keep their defaults. Unknown keys and malformed
    values raise a ValueError naming the key.
    """
    values: dict = {}
    if path is not None:
        values.update(load_config_file(path))
    for key, value in (overrides or {}).items():
        if key not in _CONFIG_SCHEMA:
            raise ValueError(f"unknown configuration key '{key}'")
        values[key] = _convert(key, value)
    return ExperimentConfig(**values)
