"""Command-line front end for BER sweeps."""

from __future__ import annotations

import argparse
from typing import Optional, Sequence

from .harness import emit_plot_script, parse_config, run_sweep, write_csv


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hdrmimo",
        description=(
            "Monte Carlo BER sweep for a quantized massive MU-MIMO uplink "
            "with clustered Householder spatial transforms."
        ),
    )
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--rho-db", type=float, help="strong-user dynamic range [dB]")
    p.add_argument("--q-bits", type=int, help="ADC resolution in bits")
    p.add_argument("--clusters", type=int, help="number of antenna clusters")
    p.add_argument("--bs-antennas", type=int, help="basestation antenna count")
    p.add_argument("--ues", type=int, help="number of single-antenna users")
    p.add_argument("--msnr-start", type=float, help="first MSNR point [dB]")
    p.add_argument("--msnr-stop", type=float, help="last MSNR point [dB]")
    p.add_argument("--msnr-step", type=float, help="MSNR grid step [dB]")
    p.add_argument(
        "--methods",
        help="comma list from: perfect, wsu, none, hr-iso, hr-max",
    )
    p.add_argument(
        "--realizations", type=int, help="channel realizations per MSNR point"
    )
    p.add_argument(
        "--symbols", type=int, help="symbol vectors per channel realization"
    )
    p.add_argument("--seed", type=int, help="master seed for all substreams")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--plot-script", help="also emit a gnuplot script here")
    p.add_argument("--threads", type=int, help="worker threads for the sweep")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key != "config" and value is not None
    }
    try:
        cfg = parse_config(args.config, overrides)
    except (ValueError, OSError) as exc:
        build_parser().error(str(exc))
        return 2  # unreachable; error() exits
    records = run_sweep(cfg)
    write_csv(records, cfg.out)
    if cfg.plot_script:
        emit_plot_script(records, cfg.plot_script, csv_path=cfg.out)
    for r in records:
        print(
            f"{r.method:8s} msnr={r.msnr_db:6.2f} dB  "
            f"ber={r.ber:.3e}  ({r.bit_errors}/{r.total_bits} bits)"
        )
    print(f"wrote {len(records)} records to {cfg.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
