"""Command-line front end: closed-form evaluation and ensemble sweeps, as CSV.

dB and dBm exist only here; everything behind this boundary runs linear.
Defaults reproduce the library's reference operating points (33 dBm transmit
power, 0.01 mW noise, beta 10, path-loss exponent 2, a 10 km segment,
thresholds of 5 and 15 dB, 10^3 trials).
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import analytic, channel, montecarlo
from .analytic import ClosedFormOverflowError, DivergentMeanError
from .scenario import ScenarioParams

ANALYTIC_HEADER = ["model", "rho", "psi_db", "m_or_M", "metric", "value"]
SIMULATE_HEADER = [
    "model",
    "rho",
    "psi_db",
    "n_vehicles",
    "trials",
    "metric",
    "estimate",
    "ci_lo",
    "ci_hi",
    "seed",
    "decider_mismatches",
    "error",
]

_DENSITY_SWEEP_RHO = "0.002:0.03:0.004"
_DENSITY_SWEEP_PSI = "5,15"
_Z95 = montecarlo._Z95


def _parse_value_spec(text: str, flag: str) -> list[float]:
    """Parse '0.01', '0.01,0.02' or 'start:stop:step' (stop inclusive)."""
    text = text.strip()
    if not text:
        raise argparse.ArgumentTypeError(f"{flag}: empty value list")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"{flag}: range must be start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"{flag}: {exc}") from None
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"{flag}: need step > 0 and stop >= start")
        values = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + 0.5 * step:
                break
            values.append(min(v, stop))
            k += 1
        return values
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{flag}: {exc}") from None


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _spec_type(flag: str):
    def parse(text: str) -> list[float]:
        return _parse_value_spec(text, flag)

    return parse


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rho", type=_spec_type("--rho"), default=[0.019],
                        help="vehicle density [veh/m]: value, comma list, or start:stop:step")
    common.add_argument("--psi-db", type=_spec_type("--psi-db"), default=[5.0, 15.0],
                        help="SNR threshold [dB]: value, comma list, or start:stop:step")
    common.add_argument("--tx-dbm", type=float, default=33.0, help="transmit power [dBm]")
    common.add_argument("--noise-mw", type=float, default=0.01, help="noise power [mW]")
    common.add_argument("--beta", type=float, default=10.0,
                        help="reference path loss times antenna gain")
    common.add_argument("--alpha", type=int, default=2, help="path-loss exponent")
    common.add_argument("--length-m", type=float, default=10_000.0, help="road length [m]")
    common.add_argument("--big-m", type=int, default=10,
                        help="one-side neighbour span for link/vehicle metrics")
    common.add_argument("--model", choices=["unit_disc", "rayleigh", "both"], default="both")
    common.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    parser = argparse.ArgumentParser(
        prog="vanetconn",
        description="1D vehicular network connectivity under unit-disc and "
                    "Rayleigh-fading channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analytic", parents=[common],
                   help="closed-form metrics on a (rho, psi) grid")

    sim = sub.add_parser("simulate", parents=[common],
                         help="graph-ensemble estimates on a (rho, psi) grid")
    sim.add_argument("--trials", type=int, default=1000, help="trials per grid point")
    sim.add_argument("--seed", type=int, default=1, help="master seed")
    sim.add_argument("--decider", choices=list(montecarlo.DECIDERS), default="eigen",
                     help="connectivity decision path")
    sim.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    sim.add_argument("--preset", choices=["density-sweep"], default=None,
                     help="density-sweep: densities 0.002..0.03, thresholds 5 and 15 dB, "
                          "both models")
    return parser


def _grid(args) -> list[tuple[float, float]]:
    return [(rho, psi_db) for rho in args.rho for psi_db in args.psi_db]


def _models(args) -> tuple[str, ...]:
    if args.model == "both":
        return montecarlo.MODELS
    return (args.model,)


def _make_params(args, rho: float, psi_db: float) -> ScenarioParams:
    return ScenarioParams(
        rho=rho,
        road_length=args.length_m,
        tx_power=channel.dbm_to_mw(args.tx_dbm),
        noise_power=args.noise_mw,
        beta=args.beta,
        ple=args.alpha,
        psi=channel.db_to_linear(psi_db),
    )


def _analytic_rows(args):
    big_m = args.big_m
    for rho, psi_db in _grid(args):
        params = _make_params(args, rho, psi_db)
        r = analytic.communication_range(params)
        point = {"rho": _fmt(rho), "psi_db": _fmt(psi_db)}
        if "unit_disc" in _models(args):
            yield {**point, "model": "unit_disc", "m_or_M": "",
                   "metric": "unit_disc_range_m", "value": _fmt(r)}
            for m in range(1, big_m + 1):
                yield {**point, "model": "unit_disc", "m_or_M": str(m),
                       "metric": "p_single_link", "value": _fmt(analytic.p_sl_ud_mth(params, m))}
            for m in range(1, big_m + 1):
                yield {**point, "model": "unit_disc", "m_or_M": str(m),
                       "metric": "avg_snr", "value": _snr_value(analytic.avg_snr_ud, params, m)}
            yield {**point, "model": "unit_disc", "m_or_M": "",
                   "metric": "p_network", "value": _fmt(analytic.p_network_ud(params))}
            yield {**point, "model": "unit_disc", "m_or_M": "",
                   "metric": "p_vehicle_one_side", "value": _fmt(analytic.p_vehicle_ud(params))}
            yield {**point, "model": "unit_disc", "m_or_M": "",
                   "metric": "avg_node_degree", "value": _fmt(2.0 * rho * r)}
        if "rayleigh" in _models(args):
            for m in range(1, big_m + 1):
                yield {**point, "model": "rayleigh", "m_or_M": str(m),
                       "metric": "p_single_link", "value": _fmt(analytic.p_sl_rayleigh(params, m))}
            if params.ple == 2:
                for m in range(1, big_m + 1):
                    try:
                        value = _fmt(analytic.p_sl_rayleigh_closed_alpha2(params, m))
                    except ClosedFormOverflowError:
                        value = "overflow_guard"
                    yield {**point, "model": "rayleigh", "m_or_M": str(m),
                           "metric": "p_single_link_closed", "value": value}
            for m in range(1, big_m + 1):
                yield {**point, "model": "rayleigh", "m_or_M": str(m),
                       "metric": "avg_snr", "value": _snr_value(analytic.avg_snr_rayleigh, params, m)}
            yield {**point, "model": "rayleigh", "m_or_M": "",
                   "metric": "avg_node_degree", "value": _fmt(analytic.avg_node_degree(params))}
            yield {**point, "model": "rayleigh", "m_or_M": str(big_m),
                   "metric": "p_vehicle_one_side",
                   "value": _fmt(analytic.p_vehicle_one_side_rayleigh(params, big_m))}
            yield {**point, "model": "rayleigh", "m_or_M": str(big_m),
                   "metric": "p_vehicle_two_side",
                   "value": _fmt(analytic.p_vehicle_rayleigh(params, big_m))}


def _snr_value(fn, params, m) -> str:
    try:
        return _fmt(fn(params, m))
    except DivergentMeanError:
        return "diverges"


def _simulate_rows(args):
    rows = montecarlo.sweep(
        _grid_linear(args),
        _models(args),
        args.trials,
        args.seed,
        road_length=args.length_m,
        tx_power=channel.dbm_to_mw(args.tx_dbm),
        noise_power=args.noise_mw,
        beta=args.beta,
        ple=args.alpha,
        big_m=args.big_m,
        decider=args.decider,
        workers=args.workers,
    )
    psi_db_of = {channel.db_to_linear(p): p for _, p in _grid(args)}
    for row in rows:
        psi_db = psi_db_of[row.psi]
        base = {
            "model": row.model,
            "rho": _fmt(row.rho),
            "psi_db": _fmt(psi_db),
            "n_vehicles": "" if row.n_vehicles is None else str(row.n_vehicles),
            "trials": str(args.trials),
            "seed": str(args.seed),
        }
        if row.error is not None:
            yield {**base, "metric": "error", "estimate": "", "ci_lo": "", "ci_hi": "",
                   "decider_mismatches": "", "error": row.error}
            continue
        result = row.result
        mismatches = str(result.decider_mismatches()) if args.decider == "both" else ""
        def emit(metric, estimate, lo, hi):
            return {**base, "metric": metric, "estimate": _fmt(estimate),
                    "ci_lo": _fmt(lo), "ci_hi": _fmt(hi),
                    "decider_mismatches": mismatches, "error": ""}

        net = result.network_connectivity()
        yield emit("network_connectivity", net.estimate, net.ci_lo, net.ci_hi)
        one = result.vehicle_connectivity(side="one", direction="forward")
        yield emit("vehicle_connectivity_one_side", one.estimate, one.ci_lo, one.ci_hi)
        two = result.vehicle_connectivity(side="two")
        yield emit("vehicle_connectivity_two_side", two.estimate, two.ci_lo, two.ci_hi)
        deg = result.node_degree()
        yield emit("mean_node_degree", deg.mean,
                   deg.mean - _Z95 * deg.std_error, deg.mean + _Z95 * deg.std_error)
        for m in range(1, min(args.big_m, (row.n_vehicles or 2) - 1) + 1):
            link = result.single_link(m)
            yield emit(f"single_link_m{m}", link.estimate, link.ci_lo, link.ci_hi)


def _grid_linear(args) -> list[tuple[float, float]]:
    return [(rho, channel.db_to_linear(psi_db)) for rho, psi_db in _grid(args)]


def _write_csv(path: str, header: list[str], rows) -> None:
    def write(handle):
        writer = csv.DictWriter(handle, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)

    if path == "-":
        write(sys.stdout)
    else:
        with open(path, "w", newline="") as handle:
            write(handle)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.preset == "density-sweep":
        args.rho = _parse_value_spec(_DENSITY_SWEEP_RHO, "--rho")
        args.psi_db = _parse_value_spec(_DENSITY_SWEEP_PSI, "--psi-db")
        args.model = "both"
    try:
        if args.command == "analytic":
            _write_csv(args.out, ANALYTIC_HEADER, _analytic_rows(args))
        else:
            _write_csv(args.out, SIMULATE_HEADER, _simulate_rows(args))
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"vanetconn: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
