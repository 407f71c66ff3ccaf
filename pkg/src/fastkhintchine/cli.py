"""Command-line front end.

Exit codes: 0 success, 1 a checked property failed, 2 usage error,
3 computation error (gate, horizon, precision or budget).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Callable, Optional

from . import cf_core
from .constructions import (LOWER_LIMINF, UPPER_LIMSUP, TargetSequence, build_seq_B, build_seq_T,
                            build_witness, sample_E_set)
from .dimension import CoveringParams, covering_bound, dim_formulas
from .errors import (AssertionFailure, BudgetError, DomainError, GateError, HorizonError,
                     IndistinguishableError, KhintchineError, PreconditionError)
from .growth import MAX_PREFIX, MIN_TAIL, envelope, equiv_check, exponents, parse_growth
from .interval import MAX_PREC
from .reports import Report, dumps, series_csv
from .suites import PROFILES, paper_example_suite, verify_all

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3

COMMANDS = ("expand", "exponents", "envelope", "witness", "seq-b", "seq-t", "sample-e",
            "covering", "dims", "paper-example", "verify-all")

# flags each command cannot run without
REQUIRED = {
    "expand": ("x",),
    "exponents": ("growth", "horizon"),
    "envelope": ("growth", "n_max"),
    "witness": ("growth", "n_max"),
    "seq-b": ("growth", "n_max"),
    "seq-t": ("growth", "n_max"),
    "sample-e": ("growth", "depth", "count"),
    "covering": ("K",),
    "dims": ("growth",),
}


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fastkhintchine",
                                 description="Continued fractions with fast-growing Birkhoff sums.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--growth", help="power:p=2 | exp:c=2[,scale=1] | factorial-blocks | table:<csv>")
    ap.add_argument("--horizon", type=int)
    ap.add_argument("--n-max", type=int, dest="n_max")
    ap.add_argument("--depth", type=int)
    ap.add_argument("--count", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epsilon", type=_rational, default=Fraction(1, 2))
    ap.add_argument("--precision-bits", type=int, default=256, dest="precision_bits")
    ap.add_argument("--output", help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--profile", choices=tuple(PROFILES), default="small")
    ap.add_argument("--x", type=_rational, help="rational to expand (expand)")
    ap.add_argument("--K", type=_rational, help="digit-product threshold (covering)")
    ap.add_argument("--N", type=int, default=10, help="first chain order (covering)")
    ap.add_argument("--kind", choices=("min-tail", "max-prefix"), default="min-tail")
    ap.add_argument("--mode", choices=("upper", "lower"), default="upper")
    return ap


def _config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if v is not None and k not in ("output", "format")}
    return {k: str(v) if isinstance(v, Fraction) else v for k, v in cfg.items()}


def _validate(args: argparse.Namespace) -> None:
    if not 64 <= args.precision_bits <= MAX_PREC:
        raise UsageError(f"--precision-bits must lie in [64, {MAX_PREC}]")
    for name in REQUIRED.get(args.command, ()):
        if getattr(args, name) is None:
            raise UsageError(f"{args.command} requires --{name.replace('_', '-')}")
    for name in ("horizon", "n_max", "depth", "count"):
        v = getattr(args, name)
        if v is not None and v < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")


# -- command handlers --------------------------------------------------------------

def cmd_expand(args, rep: Report) -> None:
    x = args.x
    quotients = cf_core.cf_expand(x, args.n_max)
    rep.series = [{"n": i, "a": a} for i, a in enumerate(quotients, start=1)]
    rep.summary["quotients"] = quotients
    if args.n_max is None or args.n_max >= len(quotients):
        rep.check("matches subtractive Euclid",
                  quotients == cf_core.euclid_subtractive(x.numerator, x.denominator))
        rep.check("value reconstructs x", cf_core.cf_value(quotients) == x)


def cmd_exponents(args, rep: Report) -> None:
    g = parse_growth(args.growth)
    er = exponents(g, args.horizon, min(args.precision_bits, 256))
    rep.summary.update(b=er.b_hat, B=er.B_hat, beta=er.beta_hat, beta_window_raw=er.beta_window_raw,
                       beta_projected=er.beta_projected, known=g.known_exponents)
    rep.series = [{"n": i, **w} for i, w in enumerate(er.tail_series, start=1)]
    rep.check("b <= B <= beta", er.b_hat.lo <= er.B_hat.hi and er.B_hat.lo <= er.beta_hat.hi)


def cmd_envelope(args, rep: Report) -> None:
    g = parse_growth(args.growth)
    kind = MIN_TAIL if args.kind == "min-tail" else MAX_PREFIX
    env = envelope(g, kind, args.n_max, args.horizon, allow_flagged=args.horizon is not None)
    eq = equiv_check(g, env, args.n_max)
    touched = set(env.touch_indices)
    rep.series = [{"n": n, "psi": env.psi[n - 1], "envelope": env.at(n), "touch": n in touched}
                  for n in range(1, args.n_max + 1)]
    rep.summary.update(kind=kind, touches=len(env.touch_indices), verdict=eq.verdict,
                       flagged=env.flagged, horizon_used=env.horizon_used)
    rep.check("envelope on the correct side of psi", eq.bounded_by_one)
    rep.check("envelope is non-decreasing",
              all(env.at(n) <= env.at(n + 1) for n in range(1, args.n_max)))


def cmd_witness(args, rep: Report) -> None:
    g = parse_growth(args.growth)
    mode = UPPER_LIMSUP if args.mode == "upper" else LOWER_LIMINF
    w = build_witness(g, mode, args.n_max, horizon=args.horizon)
    for n in range(1, args.n_max + 1):
        rep.series.append({"n": n, "a": w.point.quotient(n).as_logvalue(), "alpha": w.alpha[n - 1],
                           "ratio": w.ratio_series[n - 1]})
    rep.summary.update(mode=mode, envelope=w.envelope_kind, tail_sup=w.tail_sup, tail_inf=w.tail_inf,
                       max_width=w.max_width, touches=len(w.touch_indices))
    rep.absorb(w.trace.properties)


def cmd_seq_b(args, rep: Report) -> None:
    g = parse_growth(args.growth)
    sb = build_seq_B(g, args.epsilon, args.n_max)
    touched = set(sb.touch_indices)
    rep.series = [{"n": n, "log_B": sb.log_B[n - 1], "touch": n in touched}
                  for n in range(1, args.n_max + 1)]
    rep.summary.update(b_used=sb.b_used, b_flagged=sb.b_flagged, first_retouch=sb.first_retouch,
                       missing_windows=len(sb.missing_windows), dim_lower_bound=sb.dim_lower_bound,
                       target_bound=sb.target_bound)
    rep.provenance["windows_from"] = sb.first_retouch
    rep.absorb(sb.trace.properties)


def cmd_seq_t(args, rep: Report) -> None:
    g = parse_growth(args.growth)
    st = build_seq_T(g, args.epsilon, args.n_max)
    rep.series = [{"n": j, "log_T": st.log_T[j - 1], "t": st.t[j - 1], "ratio": st.ratio_series[j - 1]}
                  for j in range(1, args.n_max + 1)]
    rep.summary.update(B_used=st.B_used, B_flagged=st.B_flagged, tail_inf=st.tail_inf,
                       dim_lower_bound=st.dim_lower_bound, target_bound=st.target_bound)
    rep.provenance.update(certificate_start=st.certificate_start, scan_end=st.scan_end)
    rep.absorb(st.trace.properties)


def cmd_sample_e(args, rep: Report) -> None:
    g = parse_growth(args.growth)
    ts = TargetSequence.matched_to(g)
    sr = sample_E_set(ts, args.depth, args.count, args.seed)
    for n in range(1, args.depth + 1):
        col = [q[n - 1] for q in sr.quotients]
        rep.series.append({"n": n, "s": ts.s_at(n), "a_min": min(col) if col else None,
                           "a_max": max(col) if col else None})
    rep.summary.update(count=args.count, dimension=sr.dimension)
    rep.check("s_n <= a_n <= 2 s_n at every index", sr.membership_ok, sr.first_violation)


def cmd_covering(args, rep: Report) -> None:
    params = CoveringParams(args.epsilon, args.K)
    rep.provenance["M_eps"] = params.M_eps
    cb = covering_bound(params, args.N)
    rep.series = [{"n": args.N + i, "chain_term": t} for i, t in enumerate(cb.terms)]
    rep.summary.update(M_eps=params.M_eps, ratio=cb.ratio, bound=cb.bound, coarse=cb.coarse)
    rep.check("chain terms <= 2^-n", cb.chain_ok)
    rep.check("bound <= 2^-(N-1)", cb.bound.certainly_le(cb.coarse))


def cmd_dims(args, rep: Report) -> None:
    g = parse_growth(args.growth)
    if g.known_exponents is not None:
        b, B, beta = g.known_exponents
        rep.summary["exponent_source"] = "closed form"
    else:
        if args.horizon is None:
            raise UsageError("dims needs --horizon when the exponents are not known in closed form")
        er = exponents(g, args.horizon)
        b, B, beta = (Fraction(str(round(float(iv.mid()), 12))) for iv in (er.b_hat, er.B_hat, er.beta_hat))
        rep.summary["exponent_source"] = "window estimate"
    d = dim_formulas(b, B, beta)
    rep.summary.update(exponents=[b, B, beta], dims=list(d.as_tuple()), clamped=d.clamped)


HANDLERS: dict[str, Callable] = {
    "expand": cmd_expand, "exponents": cmd_exponents, "envelope": cmd_envelope,
    "witness": cmd_witness, "seq-b": cmd_seq_b, "seq-t": cmd_seq_t, "sample-e": cmd_sample_e,
    "covering": cmd_covering, "dims": cmd_dims,
}


def run(args: argparse.Namespace) -> tuple[Report, int]:
    _validate(args)
    if args.command == "paper-example":
        rep = paper_example_suite()
    elif args.command == "verify-all":
        rep = verify_all(args.profile)
    else:
        rep = Report(args.command, _config(args), args.precision_bits)
        HANDLERS[args.command](args, rep)
    rep.provenance["precision_bits"] = args.precision_bits
    return rep, EXIT_OK if rep.ok else EXIT_ASSERT


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        rep, code = run(args)
    except (UsageError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GateError, HorizonError, IndistinguishableError, BudgetError, PreconditionError) as exc:
        print(f"computation error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except AssertionFailure as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except KhintchineError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    text = series_csv(rep) if args.format == "csv" else dumps(rep)
    _emit(text, args.output)
    if code == EXIT_ASSERT:
        for a in rep.assertions:
            if not a["passed"]:
                print(f"failed: {a['name']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
