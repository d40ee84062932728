"""Command-line front end: parameter sweeps, chain runs, oracle checks and
the closed-form audit.

Output is deterministic: CSV values carry 12 significant digits, rows are
ordered by (eta, alpha), lines end with LF, and identical invocations
produce byte-identical files.  Exit codes: 0 success, 2 invalid arguments,
3 numeric guard failure (truncation tail, memory budget, degenerate
projection, or an engine/oracle mismatch).
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

from . import fock, metrics, protocol
from .protocol import DegenerateProjectionError
from .states import DegenerateStateError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GUARD = 3

DEFAULT_SWEEP_ETAS = (0.1, 0.4, 0.7, 1.0)
DEFAULT_AUDIT_ETAS = (0.0, 0.3, 0.7, 1.0)
CASES = ("fig4a", "fig4b", "fig4c", "zero")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    """Grid for sweep and audit commands."""
    alpha_min: float
    alpha_max: float
    alpha_steps: int
    etas: tuple[float, ...]
    case: str | None
    beta: float | None
    out: str

    def __post_init__(self):
        if self.alpha_min <= 0:
            raise UsageError("alpha-min must be positive")
        if self.alpha_max < self.alpha_min:
            raise UsageError("alpha-max must be >= alpha-min")
        if self.alpha_steps < 2:
            raise UsageError("alpha-steps must be >= 2")
        for e in self.etas:
            if not 0.0 <= e <= 1.0:
                raise UsageError(f"eta {e} outside [0, 1]")
        if self.case is not None and self.case not in CASES:
            raise UsageError(f"case must be one of {CASES}")

    def alphas(self) -> list[float]:
        step = (self.alpha_max - self.alpha_min) / (self.alpha_steps - 1)
        return [self.alpha_min + k * step for k in range(self.alpha_steps)]


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _parse_eta_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise UsageError(f"cannot parse eta list {text!r}") from None


def read_config(path: str) -> dict[str, str]:
    """Flat key=value file; blank lines and '#' comments ignored."""
    cfg: dict[str, str] = {}
    with open(path) as f:
        for raw in f:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"bad config line {raw.rstrip()!r}")
            key, val = line.split("=", 1)
            cfg[key.strip()] = val.strip()
    return cfg


def _resolve(args, cfg: dict[str, str], key: str, cast, default):
    """Flag value wins, then config file, then the built-in default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in cfg:
        return cast(cfg[key])
    return default


# --- commands ------------------------------------------------------------------

def cmd_entropy_sweep(spec: SweepSpec) -> int:
    lines = ["alpha,eta,engine_S,closed_form_S"]
    for eta in sorted(spec.etas):
        for alpha in spec.alphas():
            engine = metrics.entropy_ad(alpha, eta, spec.beta)
            closed = metrics.closed_form_entropy(alpha, eta)
            lines.append(",".join((fmt(alpha), fmt(eta), fmt(engine), fmt(closed))))
    _write_lines(spec.out, lines)
    print(f"wrote {len(lines) - 1} rows to {spec.out}")
    return EXIT_OK


def cmd_fidelity_sweep(spec: SweepSpec) -> int:
    case = spec.case or "fig4a"
    lines = ["alpha,eta,engine_F,closed_form_F"]
    for eta in sorted(spec.etas):
        for alpha in spec.alphas():
            target = metrics.target_for_case(case, metrics.default_beta(alpha))
            engine = metrics.fidelity_ad(alpha, eta, case, spec.beta)
            closed = metrics.closed_form_fidelity(alpha, eta, target)
            lines.append(",".join((fmt(alpha), fmt(eta), fmt(engine), fmt(closed))))
    _write_lines(spec.out, lines)
    print(f"wrote {len(lines) - 1} rows to {spec.out} (case {case})")
    return EXIT_OK


def cmd_chain(n: int, alpha: float, beta: float | None, eta: float,
              out: str | None) -> int:
    if n < 2:
        raise UsageError("chain exponent n must be >= 2")
    if not 0.0 <= eta <= 1.0:
        raise UsageError(f"eta {eta} outside [0, 1]")
    b = beta if beta is not None else metrics.default_beta(alpha)
    report = protocol.run_chain(n, alpha, b, eta)
    lines = [
        f"n={n}",
        f"locations={2 ** n}",
        f"alpha={fmt(alpha)}",
        f"beta={fmt(b)}",
        f"eta={fmt(eta)}",
        f"swap_count={report.swap_count}",
        "per_swap_weights=" + ",".join(fmt(w) for w in report.per_swap_weights),
        f"end_modes={report.end_modes[0]},{report.end_modes[1]}",
        f"entropy={fmt(report.entropy)}",
        f"fidelity_vs_ideal_qbs={fmt(report.fidelity_vs_ideal_qbs)}",
    ]
    if out:
        _write_lines(out, lines)
        print(f"wrote chain report to {out}")
    else:
        print("\n".join(lines))
    return EXIT_OK


def cmd_oracle_check(alpha: float, eta: float, beta: float | None,
                     cutoff: int | None, out: str | None,
                     oracle_tol: float) -> int:
    lines = []
    worst = 0.0
    for scenario in fock.SCENARIOS:
        chk = fock.cross_check(scenario, alpha, eta, beta, cutoff)
        worst = max(worst, chk.max_deviation)
        status = "ok" if chk.max_deviation < oracle_tol else "MISMATCH"
        lines.append(f"scenario={scenario} cutoff={chk.cutoff} "
                     f"max_deviation={fmt(chk.max_deviation)} status={status}")
    ok = worst < oracle_tol
    lines.append(f"all_ok={'true' if ok else 'false'} worst={fmt(worst)} "
                 f"tolerance={fmt(oracle_tol)}")
    if out:
        _write_lines(out, lines)
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_GUARD


def cmd_audit(spec: SweepSpec, cutoff: int | None, flag_tol: float,
              oracle_tol: float) -> int:
    quantity = "entropy" if spec.case is None else "fidelity"
    rows = metrics.audit_formulas(
        spec.alphas(), spec.etas, quantity=quantity,
        case=spec.case or "fig4a", beta=spec.beta, cutoff=cutoff,
        flag_tol=flag_tol)
    lines = ["alpha,eta,engine,closed_form,oracle,flag"]
    for r in rows:
        lines.append(",".join((
            fmt(r.alpha), fmt(r.eta), fmt(r.engine), fmt(r.closed_form),
            fmt(r.oracle), "true" if r.flag else "false")))
    _write_lines(spec.out, lines)
    bad = [r for r in rows if abs(r.engine - r.oracle) >= oracle_tol]
    flagged = sum(r.flag for r in rows)
    print(f"wrote {len(rows)} {quantity} audit rows to {spec.out}; "
          f"{flagged} flagged engine/closed-form discrepancies")
    if bad:
        print(f"error: engine vs oracle deviation >= {oracle_tol} on "
              f"{len(bad)} rows (worst {max(abs(r.engine - r.oracle) for r in bad):.3e})",
              file=sys.stderr)
        return EXIT_GUARD
    return EXIT_OK


# --- argument handling ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="catswap",
        description="Entanglement swapping over entangled coherent states: "
                    "sweeps, chain runs, oracle checks and closed-form audits.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_grid(sp):
        sp.add_argument("--alpha-min", type=float, dest="alpha_min")
        sp.add_argument("--alpha-max", type=float, dest="alpha_max")
        sp.add_argument("--alpha-steps", type=int, dest="alpha_steps")
        sp.add_argument("--eta", type=str, help="comma-separated list of transmittances")
        sp.add_argument("--beta", type=float, help="measurement amplitude "
                        "(default: alpha/sqrt(2) per grid point)")
        sp.add_argument("--config", type=str, help="flat key=value config file")
        sp.add_argument("--out", type=str, help="output CSV path")

    s = sub.add_parser("entropy-sweep", help="entropy of the swapped pair over an (alpha, eta) grid")
    add_grid(s)

    s = sub.add_parser("fidelity-sweep", help="fidelity against a named target over an (alpha, eta) grid")
    add_grid(s)
    s.add_argument("--case", choices=CASES)

    s = sub.add_parser("chain", help="run a 2^n-location repeater chain")
    s.add_argument("--n", type=int, help="chain exponent (>= 2)")
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--eta", type=str)
    s.add_argument("--config", type=str)
    s.add_argument("--out", type=str)

    s = sub.add_parser("oracle-check", help="compare engine and Fock oracle on all scenarios")
    s.add_argument("--alpha", type=float)
    s.add_argument("--eta", type=str)
    s.add_argument("--beta", type=float)
    s.add_argument("--cutoff", type=int)
    s.add_argument("--config", type=str)
    s.add_argument("--out", type=str)

    s = sub.add_parser("audit", help="engine vs closed-form vs oracle audit CSV")
    add_grid(s)
    s.add_argument("--case", choices=CASES,
                   help="audit the fidelity closed form for this case "
                        "(default: audit the entropy closed form)")
    s.add_argument("--cutoff", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = read_config(args.config) if getattr(args, "config", None) else {}

        if args.command in ("entropy-sweep", "fidelity-sweep", "audit"):
            is_audit = args.command == "audit"
            etas_text = _resolve(args, cfg, "eta", str, None)
            etas = (_parse_eta_list(etas_text) if etas_text is not None
                    else (DEFAULT_AUDIT_ETAS if is_audit else DEFAULT_SWEEP_ETAS))
            case = _resolve(args, cfg, "case", str, None)
            default_out = {
                "entropy-sweep": "entropy_sweep.csv",
                "fidelity-sweep": f"fidelity_sweep_{case or 'fig4a'}.csv",
                "audit": (f"audit_fidelity_{case}.csv" if case and is_audit
                          else "audit_entropy.csv"),
            }[args.command]
            spec = SweepSpec(
                alpha_min=_resolve(args, cfg, "alpha_min", float,
                                   0.5 if is_audit else 0.05),
                alpha_max=_resolve(args, cfg, "alpha_max", float,
                                   2.0 if is_audit else 3.0),
                alpha_steps=_resolve(args, cfg, "alpha_steps", int,
                                     4 if is_audit else 60),
                etas=etas,
                case=case,
                beta=_resolve(args, cfg, "beta", float, None),
                out=_resolve(args, cfg, "out", str, default_out),
            )
            if args.command == "entropy-sweep":
                return cmd_entropy_sweep(spec)
            if args.command == "fidelity-sweep":
                return cmd_fidelity_sweep(spec)
            return cmd_audit(
                spec,
                cutoff=_resolve(args, cfg, "cutoff", int, None),
                flag_tol=float(cfg.get("flag_tol", metrics.FLAG_TOL)),
                oracle_tol=float(cfg.get("oracle_tol", metrics.ORACLE_TOL)))

        if args.command == "chain":
            n = _resolve(args, cfg, "n", int, None)
            if n is None:
                raise UsageError("chain requires --n")
            eta_text = _resolve(args, cfg, "eta", str, "1.0")
            return cmd_chain(
                n=n,
                alpha=_resolve(args, cfg, "alpha", float, 1.0),
                beta=_resolve(args, cfg, "beta", float, None),
                eta=float(eta_text),
                out=_resolve(args, cfg, "out", str, None))

        if args.command == "oracle-check":
            eta_text = _resolve(args, cfg, "eta", str, "1.0")
            return cmd_oracle_check(
                alpha=_resolve(args, cfg, "alpha", float, 1.0),
                eta=float(eta_text),
                beta=_resolve(args, cfg, "beta", float, None),
                cutoff=_resolve(args, cfg, "cutoff", int, None),
                out=_resolve(args, cfg, "out", str, None),
                oracle_tol=float(cfg.get("oracle_tol", metrics.ORACLE_TOL)))

        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, ValueError) as exc:
        if isinstance(exc, (fock.TailBudgetError, fock.MemoryBudgetError,
                            DegenerateProjectionError, DegenerateStateError)):
            print(f"numeric guard failure: {exc}", file=sys.stderr)
            return EXIT_GUARD
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
