"""Command-line front end.

All half-integers are passed doubled (``--m2x``, ``--j2x``).  Angles are in
radians; ``--reflectivity R`` is shorthand for ``theta = 2 asin(sqrt(R))``.

CSV output has a header row and 17 significant digits.  JSON output is one
object ``{config, support_twice, values, meta}``; extra columns go to
``columns``.

Exit codes: 0 success, 1 failed oracle check, 2 invalid flags, 3 resource guard.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import asymptotics as asy
from .channels import (
    ExperimentConfig,
    bsc_oid,
    channel_table,
    classical_oid_density,
    log_channel_probability,
    oid,
)
from .oracle import MAX_PHOTONS, ResourceError, evolve_and_measure, prepare_input
from .representations import Rotation, wigner_d_column

log = logging.getLogger("multihom")

COMMANDS = ("oid", "channels", "wigner", "asymptotics", "classical", "bsc", "sweep", "oracle-check")
ORACLE_TOL = 1e-10


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


class Result:
    """A table keyed by a doubled-integer support column."""

    def __init__(self, config, support_name, support, values_name, values,
                 columns=None, meta=None):
        self.config = config
        self.support_name = support_name
        self.support = [int(s) for s in support]
        self.values_name = values_name
        self.values = [float(v) for v in values]
        self.columns = {k: [float(v) for v in col] for k, col in (columns or {}).items()}
        self.meta = dict(meta or {})

    def to_csv(self) -> str:
        header = [self.support_name, self.values_name, *self.columns]
        lines = [",".join(header)]
        cols = [self.support, self.values, *self.columns.values()]
        for row in zip(*cols):
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        obj = {
            "config": self.config,
            "support_twice": self.support,
            "values": [_jsonable(v) for v in self.values],
            "meta": {k: _jsonable(v) for k, v in self.meta.items()},
        }
        if self.columns:
            obj["columns"] = {k: [_jsonable(v) for v in col] for k, col in self.columns.items()}
        return json.dumps(obj, allow_nan=False) + "\n"


class SweepResult(Result):
    """Rectangular eta x m' grid, long format in CSV."""

    def __init__(self, config, etas, support, grid, meta):
        super().__init__(config, "m_twice", support, "probability", [], meta=meta)
        self.etas = [float(e) for e in etas]
        self.grid = [[float(v) for v in row] for row in grid]

    def to_csv(self) -> str:
        lines = ["eta,m_twice,probability"]
        for eta, row in zip(self.etas, self.grid):
            for s, v in zip(self.support, row):
                lines.append(f"{_fmt(eta)},{s},{_fmt(v)}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        obj = {"config": self.config, "support_twice": self.support, "etas": self.etas,
               "values": self.grid, "meta": self.meta}
        return json.dumps(obj, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# argument handling

def _add_config_flags(p, need_eta=True, need_theta=True):
    p.add_argument("--n", type=int, help="total photon number")
    p.add_argument("--m2x", type=int, help="input imbalance, doubled: n1 - n2")
    p.add_argument("--n1", type=int, help="photons in port 1 (with --n2, instead of --n/--m2x)")
    p.add_argument("--n2", type=int, help="photons in port 2")
    if need_eta:
        p.add_argument("--eta", type=float, required=True, help="indistinguishability in [0, 1]")
        p.add_argument("--chi", type=float, default=0.0, help="overlap phase (radians)")
    if need_theta:
        _add_theta_flags(p)


def _add_theta_flags(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--theta", type=float, help="beam-splitter angle in radians (pi/2 = 50:50)")
    g.add_argument("--reflectivity", type=float, help="reflectivity R = sin^2(theta/2)")
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--psi", type=float, default=0.0)


def _add_output_flags(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")
    p.add_argument("--verbose", "-v", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multihom", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oid", help="output imbalance distribution p(m'|m)")
    _add_config_flags(p)
    p.add_argument("--fast", action="store_true", help="skip channels below 1e-16 of the maximum")
    _add_output_flags(p)

    p = sub.add_parser("channels", help="channel probabilities p(j|m)")
    _add_config_flags(p, need_theta=False)
    _add_output_flags(p)

    p = sub.add_parser("wigner", help="Wigner small-d column d^j_{m'm}(theta)")
    p.add_argument("--j2x", type=int, required=True, help="spin, doubled")
    p.add_argument("--m2x", type=int, required=True, help="column index m, doubled")
    _add_theta_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("asymptotics", help="rate function vs exact -(1/n) ln p(j|m)")
    _add_config_flags(p, need_theta=False)
    _add_output_flags(p)

    p = sub.add_parser("classical", help="random-phase classical OID (arcsine law)")
    _add_config_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("bsc", help="distinguishable-photon OID (binomial convolution)")
    _add_config_flags(p, need_eta=False)
    _add_output_flags(p)

    p = sub.add_parser("sweep", help="OID over a grid of eta values")
    _add_config_flags(p, need_eta=False)
    p.add_argument("--chi", type=float, default=0.0)
    p.add_argument("--eta-step", type=float, default=0.05, help="grid step on [0, 1]")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--fast", action="store_true")
    _add_output_flags(p)

    p = sub.add_parser("oracle-check", help="compare p(m'|m) with brute-force evolution")
    _add_config_flags(p)
    _add_output_flags(p)
    return parser


def _theta(args) -> float:
    if getattr(args, "reflectivity", None) is not None:
        r = args.reflectivity
        if not 0.0 <= r <= 1.0:
            raise UsageError(f"--reflectivity must lie in [0, 1], got {r}")
        return Rotation.from_reflectivity(r).theta
    if not math.isfinite(args.theta):
        raise UsageError("--theta must be finite")
    return args.theta


def _ports(args) -> tuple[int, int]:
    """(n, m2) from --n/--m2x, --n1/--n2, or --n with one of --n1/--n2."""
    for flag, v in (("--n1", args.n1), ("--n2", args.n2)):
        if v is not None and v < 0:
            raise UsageError(f"{flag} must be nonnegative, got {v}")
    if args.n1 is not None or args.n2 is not None:
        if args.m2x is not None:
            raise UsageError("--m2x cannot be combined with --n1/--n2")
        n1, n2 = args.n1, args.n2
        if n1 is None or n2 is None:
            if args.n is None:
                raise UsageError("--n1 and --n2 must be given together (or one of them with --n)")
            if n1 is None:
                n1 = args.n - n2
            else:
                n2 = args.n - n1
            if min(n1, n2) < 0:
                raise UsageError(f"--n1/--n2 exceeds --n={args.n}")
        elif args.n is not None and args.n != n1 + n2:
            raise UsageError(f"--n={args.n} differs from --n1 + --n2 = {n1 + n2}")
        if n1 + n2 < 1:
            raise UsageError("--n1 + --n2 must be positive")
        return n1 + n2, n1 - n2
    if args.n is None:
        raise UsageError("--n is required (or --n1/--n2)")
    if args.n < 1:
        raise UsageError(f"--n must be a positive integer, got {args.n}")
    if args.m2x is None:
        if args.n % 2:
            raise UsageError("--m2x is required for odd --n")
        m2 = 0
    else:
        m2 = args.m2x
    if abs(m2) > args.n:
        raise UsageError(f"--m2x={m2} exceeds --n={args.n} in magnitude")
    if (m2 - args.n) % 2:
        raise UsageError(f"--m2x={m2} must have the parity of --n={args.n}")
    return args.n, m2


def _eta(value, flag="--eta") -> float:
    if not 0.0 <= value <= 1.0:
        raise UsageError(f"{flag} must lie in [0, 1], got {value}")
    return value


def _config(args, eta=None, theta=True) -> ExperimentConfig:
    n, m2 = _ports(args)
    if eta is None:
        eta = _eta(args.eta)
    th = _theta(args) if theta else math.pi / 2
    return ExperimentConfig.build(n, m2, eta, th, chi=getattr(args, "chi", 0.0),
                                  phi=getattr(args, "phi", 0.0), psi=getattr(args, "psi", 0.0))


# ---------------------------------------------------------------------------
# commands

def _cmd_oid(args):
    cfg = _config(args)
    d = oid(cfg, fast=args.fast)
    return Result(cfg.as_dict(), "m_twice", d.support, "probability", d.probs,
                  meta={"normalization": d.total, "fast": args.fast})


def _cmd_channels(args):
    cfg = _config(args, theta=False)
    t = channel_table(cfg)
    cfg_dict = {k: v for k, v in cfg.as_dict().items() if k not in ("theta", "phi", "psi")}
    return Result(cfg_dict, "j_twice", t.spins, "probability", t.probs,
                  meta={"normalization": math.fsum(t.probs), "argmax_j_twice": t.argmax()})


def _cmd_wigner(args):
    j2, m2 = args.j2x, args.m2x
    if j2 < 0:
        raise UsageError(f"--j2x must be nonnegative, got {j2}")
    if abs(m2) > j2 or (j2 - m2) % 2:
        raise UsageError(f"--m2x={m2} must satisfy |m| <= j with the parity of --j2x={j2}")
    theta = _theta(args)
    col = wigner_d_column(j2, m2, theta)
    support = np.arange(-j2, j2 + 1, 2)
    return Result({"j_twice": j2, "m_twice": m2, "theta": theta}, "mp_twice", support, "d", col,
                  meta={"normalization": math.fsum(col * col)})


def _cmd_asymptotics(args):
    cfg = _config(args, theta=False)
    if not 0.0 < cfg.eta < 1.0:
        raise UsageError("--eta must lie strictly inside (0, 1) for the rate function")
    n, mbar = cfg.n, cfg.m2 / (2 * cfg.n)
    spins = cfg.spins()
    with np.errstate(divide="ignore"):
        empirical = -log_channel_probability(spins, cfg) / n
    rate = [asy.rate_function(asy.ScaledPoint(j2 / (2 * n), mbar, cfg.eta)) for j2 in spins]
    js = asy.jstar(mbar, cfg.eta)
    width = asy.gaussian_width(mbar, cfg.eta, n)
    cfg_dict = {k: v for k, v in cfg.as_dict().items() if k not in ("theta", "phi", "psi")}
    return Result(cfg_dict, "j_twice", spins, "rate", rate,
                  columns={"jbar": spins / (2 * n), "empirical_rate": empirical},
                  meta={"jbar_star": js, "j_star": n * js, "gaussian_width_jbar": width,
                        "gaussian_width_j": n * width})


def _cmd_classical(args):
    cfg = _config(args)
    support = cfg.imbalances()
    density = classical_oid_density(support / (2 * cfg.n), cfg) / cfg.n
    mbar = cfg.m2 / (2 * cfg.n)
    amp = cfg.eta * math.sqrt(0.25 - mbar**2) * abs(math.sin(cfg.theta)) * cfg.n
    center = cfg.m2 / 2 * math.cos(cfg.theta)
    return Result(cfg.as_dict(), "m_twice", support, "density", density,
                  meta={"turning_point_low": center - amp, "turning_point_high": center + amp,
                        "mean": center})


def _cmd_bsc(args):
    n, m2 = _ports(args)
    cfg = ExperimentConfig.build(n, m2, 0.0, _theta(args), phi=args.phi, psi=args.psi)
    d = bsc_oid(cfg)
    cfg_dict = {k: v for k, v in cfg.as_dict().items() if k not in ("eta", "chi")}
    return Result(cfg_dict, "m_twice", d.support, "probability", d.probs,
                  meta={"normalization": d.total, "mean": d.mean(), "variance": d.variance()})


def _sweep_row(payload):
    n, m2, eta, theta, chi, fast = payload
    return oid(ExperimentConfig.build(n, m2, eta, theta, chi), fast=fast).probs


def _cmd_sweep(args):
    n, m2 = _ports(args)
    theta = _theta(args)
    step = args.eta_step
    if not 0.0 < step <= 1.0:
        raise UsageError(f"--eta-step must lie in (0, 1], got {step}")
    if args.workers < 1:
        raise UsageError(f"--workers must be positive, got {args.workers}")
    count = int(round(1.0 / step))
    etas = [min(i * step, 1.0) for i in range(count + 1)]
    if etas[-1] < 1.0:
        etas.append(1.0)
    payloads = [(n, m2, e, theta, args.chi, args.fast) for e in etas]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(_sweep_row, payloads))
    else:
        rows = [_sweep_row(p) for p in payloads]
    cfg = ExperimentConfig.build(n, m2, 0.0, theta, args.chi)
    cfg_dict = {k: v for k, v in cfg.as_dict().items() if k != "eta"}
    return SweepResult(cfg_dict, etas, cfg.imbalances(), rows,
                       meta={"normalization_max_error": max(abs(math.fsum(r) - 1) for r in rows)})


def _cmd_oracle_check(args):
    cfg = _config(args)
    if cfg.n > MAX_PHOTONS:
        raise ResourceError(f"oracle-check is limited to n <= {MAX_PHOTONS}, got --n={cfg.n}")
    fast = oid(cfg)
    ref = evolve_and_measure(prepare_input(cfg), cfg)
    diff = np.abs(fast.probs - ref.probs)
    worst = float(diff.max())
    return Result(cfg.as_dict(), "m_twice", fast.support, "channel", fast.probs,
                  columns={"oracle": ref.probs, "abs_diff": diff},
                  meta={"max_deviation": worst, "tolerance": ORACLE_TOL,
                        "passed": worst < ORACLE_TOL})


_DISPATCH = {
    "oid": _cmd_oid, "channels": _cmd_channels, "wigner": _cmd_wigner,
    "asymptotics": _cmd_asymptotics, "classical": _cmd_classical, "bsc": _cmd_bsc,
    "sweep": _cmd_sweep, "oracle-check": _cmd_oracle_check,
}


def run(argv=None, stdout=None) -> int:
    """Parse ``argv``, run the command and write its output; returns the exit status."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    start = time.perf_counter()
    try:
        result = _DISPATCH[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"multihom {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"multihom {args.command}: resource limit: {exc}", file=sys.stderr)
        return 3
    result.meta["runtime_ms"] = 1e3 * (time.perf_counter() - start)
    log.info("%s finished in %.1f ms", args.command, result.meta["runtime_ms"])
    text = result.to_json() if args.format == "json" else result.to_csv()
    if args.output == "-":
        stdout.write(text)
    else:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    if args.command == "oracle-check" and not result.meta["passed"]:
        print(f"oracle-check: max deviation {result.meta['max_deviation']:.3e} "
              f">= {ORACLE_TOL:g}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
