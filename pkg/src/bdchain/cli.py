"""``bdchain`` command line.

Exit codes: 0 success (whatever the verdict), 1 invalid chain file or chain,
2 numeric domain error, 3 no positive solution, 4 a verify suite failed.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import closedform
from .chain import SpectralParams, full_history_solve, solve_forward, theta
from .classify import DEFAULT_TERMS, DivergencePolicy, Verdict
from .criteria import failure_criterion, hamburger, positive_solution_criterion
from .errors import (
    DomainError,
    InvalidChainError,
    NoPositiveSolutionError,
    SpecFileError,
)
from .intervals import format_sig
from .sequences import Const, format_scalar, to_scalar
from .series import genfun_constant_case, genfun_identity_check, ode_identity_residual, stirling_row
from .specfile import ChainSpec, load_spec
from .verify import DEFAULT_KMAX, DEFAULT_ORDER, Status, VerifyConfig, run_suites

EXIT_OK, EXIT_SPEC, EXIT_DOMAIN, EXIT_POSITIVITY, EXIT_VERIFY = 0, 1, 2, 3, 4

SIG_DIGITS = 12
SHOW_HEAD, SHOW_TAIL = 10, 2


class UsageError(SpecFileError):
    """Missing input that the chain file could have supplied (exit 1)."""


def format_float(x) -> str:
    return format_sig(x, SIG_DIGITS)


def _csv(rows) -> str:
    return "".join(",".join(str(field) for field in row) + "\n" for row in rows)


def _load(args) -> ChainSpec:
    spec = load_spec(args.chain)
    return spec.with_overrides(getattr(args, "lam", None), getattr(args, "K", None))


def _require_lambda(spec: ChainSpec) -> Fraction:
    if spec.lam is None:
        raise UsageError("lambda is required: put 'lambda = <rational>' in the chain file or pass --lambda")
    return spec.lam


def cmd_solve(args, out) -> int:
    spec = _load(args)
    lam = _require_lambda(spec)
    chain = spec.chain
    v0 = to_scalar(args.v0)
    v1 = None if args.v1 is None else to_scalar(args.v1)
    if args.full_history:
        # the history form needs v(1) explicitly; without --v1 it is the imposed one
        start = theta(chain, lam) * v0 if v1 is None else v1
        sol = full_history_solve(chain, chain.folded(lam).W, v0, start, args.n)
    else:
        sol = solve_forward(chain, lam, v0, v1, args.n)
    rows = [("k", "v", "m", "term")]
    for k, v in enumerate(sol.values):
        m = chain.measure(k)
        rows.append((k, format_scalar(v), format_scalar(m), format_scalar(v * v * m)))
    out.write(_csv(rows))
    return EXIT_OK


def cmd_alphabeta(args, out) -> int:
    spec = _load(args)
    lam = _require_lambda(spec)
    chain = spec.chain
    table = closedform.alpha_beta_table(chain, lam, args.kmax, cap=args.cap)
    check = solve_forward(chain, lam, 1, None, args.kmax + 1).values
    rows = [("k", "alpha", "beta", "sum", "check")]
    for pair in table:
        rows.append(
            (
                pair.k,
                format_scalar(pair.alpha),
                format_scalar(pair.beta),
                format_scalar(pair.total),
                format_scalar(check[pair.k + 1]),
            )
        )
    out.write(_csv(rows))
    return EXIT_OK


_INTERPRETATION = {
    # criterion -> (reading when the series diverges, reading when it converges)
    "hamburger": ("essentially self-adjoint", "not essentially self-adjoint"),
    "characterize": ("essentially self-adjoint", "not essentially self-adjoint"),
    "positive": ("essentially self-adjoint", "not essentially self-adjoint"),
    "failure": ("inconclusive", "not essentially self-adjoint"),
}


def _interpretation(name: str, verdict: Verdict) -> str:
    diverging, converging = _INTERPRETATION[name]
    text = diverging if verdict.kind.diverges else converging
    if not verdict.kind.proved and text != "inconclusive":
        text += " (heuristic, not proved)"
    return text


def _echo(argv: Sequence[str]) -> str:
    return "command: bdchain " + " ".join(argv)


def _summary_block(spec: ChainSpec) -> list:
    return ["# chain"] + spec.summary_lines()


def render_verdict(name: str, verdict: Verdict, n: int) -> list:
    terms = verdict.terms
    window = len(terms)
    lines = [f"terms (first {min(SHOW_HEAD, window)} and last {SHOW_TAIL} of {window} inspected)", "k,term"]
    shown = list(range(min(SHOW_HEAD, window)))
    shown += [k for k in range(max(window - SHOW_TAIL, 0), window) if k not in shown]
    for k in shown:
        lines.append(f"{k},{format_float(terms[k])}")
    ev = verdict.evidence
    lines.append(f"partial sum S_{n} = {format_float(ev.partial_sum_n)}")
    lines.append(f"partial sum S_{2 * n} = {format_float(ev.partial_sum_2n)}")
    lines.append(f"verdict: {verdict.kind.value}")
    if ev.bound_kind == "lower":
        lines.append(f"evidence: term_k >= {format_float(ev.bound_value)} for all k >= {ev.start_index}")
    elif ev.bound_kind == "ratio":
        lines.append(f"evidence: term_(k+1)/term_k <= {format_float(ev.bound_value)} < 1 for all k >= {ev.start_index}")
    else:
        lines.append("evidence: no tail certificate; partial-sum comparison only")
    if ev.justification:
        lines.append(f"justification: {ev.justification}")
    lines.append(f"interpretation: {_interpretation(name, verdict)}")
    if verdict.caveats:
        lines.extend(f"caveat: {c}" for c in verdict.caveats)
    else:
        lines.append("caveats: none")
    return lines


def cmd_criterion(args, out, argv) -> int:
    spec = _load(args)
    policy = DivergencePolicy(delta=to_scalar(args.delta))
    lines = [_echo(argv)] + _summary_block(spec)
    if args.name == "hamburger":
        verdict = hamburger(spec.chain, args.terms, policy)
    else:
        params = SpectralParams(_require_lambda(spec), spec.K)
        if args.name == "characterize":
            verdict = closedform.esa_characterize(spec.chain, params, args.terms, policy)
        elif args.name == "failure":
            verdict = failure_criterion(spec.chain, params, args.terms, policy)
        else:
            verdict = positive_solution_criterion(spec.chain, params, args.terms, policy)
    lines += render_verdict(args.name, verdict, args.terms)
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def _power_law_exponent(spec: ChainSpec, lam: Fraction, order: int) -> Optional[int]:
    """``gamma`` if ``b`` is constant and ``(W - lam) m = r^gamma`` on ``1..order``."""
    if not isinstance(spec.chain.b, Const):
        return None
    folded = spec.chain.folded(lam)
    weights = [folded.potential(r) * folded.measure(r) for r in range(1, order + 1)]
    for gamma in range(0, order - 1):
        if all(w == r ** gamma for r, w in zip(range(1, order + 1), weights)):
            return gamma
    return None


def cmd_series(args, out, argv) -> int:
    if args.series_command == "genfun":
        series = genfun_constant_case(args.alpha, args.v0, args.v1, args.order)
        rows = [("r", "coefficient")] + [(r, format_scalar(series[r])) for r in range(1, args.order + 1)]
        out.write(_csv(rows))
        return EXIT_OK
    if args.series_command == "stirling":
        if args.gamma < 0:
            raise DomainError("gamma must be nonnegative")
        row = stirling_row(args.gamma)
        out.write(_csv([range(args.gamma + 1), row]))
        return EXIT_OK

    spec = _load(args)
    lam = _require_lambda(spec)
    lines = [_echo(argv)] + _summary_block(spec)
    failed = False
    v1 = theta(spec.chain, lam)
    if v1 == 0:
        lines.append("SKIPPED generating-function-identity: v_1 = 0, the beta deconvolution has no pivot")
    else:
        check = genfun_identity_check(spec.chain.folded(lam), 1, v1, args.order)
        failed |= not check.holds
        lines.append(f"generating-function-identity residual {format_scalar(check.residual)} through order {check.order}")
    gamma = _power_law_exponent(spec, lam, args.order)
    if gamma is not None and args.order >= gamma + 2:
        check = ode_identity_residual(spec.chain.b.c, gamma, 1, v1, args.order)
        failed |= not check.holds
        lines.append(f"ode-identity (gamma = {gamma}) residual {format_scalar(check.residual)} through order {check.order}")
    else:
        lines.append("ode-identity: not applicable (needs constant b and (W - lambda) m = r^gamma)")
    out.write("\n".join(lines) + "\n")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_verify(args, out, argv) -> int:
    spec = _load(args)
    lam = _require_lambda(spec)
    cfg = VerifyConfig(
        lam=lam,
        K=spec.K,
        kmax=args.kmax,
        order=args.order,
        terms=args.terms,
        cap=args.cap,
        delta=to_scalar(args.delta),
    )
    results = run_suites(spec.chain, cfg)
    lines = [_echo(argv)] + _summary_block(spec) + [r.line() for r in results]
    out.write("\n".join(lines) + "\n")
    return EXIT_VERIFY if any(r.status is Status.FAIL for r in results) else EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bdchain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def chain_args(p, spectral=True):
        p.add_argument("--chain", required=True, metavar="FILE", help="chain specification file")
        if spectral:
            p.add_argument("--lambda", dest="lam", metavar="R", help="spectral shift (overrides the file)")
            p.add_argument("--K", dest="K", metavar="R", help="form lower bound (overrides the file)")

    p = sub.add_parser("solve", help="forward solution as CSV k,v,m,term")
    chain_args(p)
    p.add_argument("--v0", required=True, metavar="R")
    p.add_argument("--v1", metavar="R", help="free v(1); default imposes the equation at 0")
    p.add_argument("--n", required=True, type=_positive_int, metavar="N")
    p.add_argument("--full-history", action="store_true", help="use the full-history recurrence")

    p = sub.add_parser("alphabeta", help="composition coefficients as CSV k,alpha,beta,sum,check")
    chain_args(p)
    p.add_argument("--kmax", type=_nonnegative_int, default=DEFAULT_KMAX, metavar="K")
    p.add_argument("--cap", type=_nonnegative_int, metavar="C", help=f"enumeration cap (default ${closedform.CAP_ENV} or {closedform.DEFAULT_CAP})")

    p = sub.add_parser("criterion", help="classify one of the self-adjointness series")
    p.add_argument("name", choices=["hamburger", "characterize", "failure", "positive"])
    chain_args(p)
    p.add_argument("--terms", type=_positive_int, default=DEFAULT_TERMS, metavar="N")
    p.add_argument("--delta", default="1/100", metavar="D")

    p = sub.add_parser("series", help="generating-function tools")
    ssub = p.add_subparsers(dest="series_command", required=True)
    g = ssub.add_parser("genfun", help="constant-case generating function coefficients")
    g.add_argument("--alpha", required=True, metavar="R")
    g.add_argument("--v0", required=True, metavar="R")
    g.add_argument("--v1", required=True, metavar="R")
    g.add_argument("--order", type=_positive_int, default=DEFAULT_ORDER, metavar="N")
    v = ssub.add_parser("verify", help="generating-function identities on a chain")
    chain_args(v)
    v.add_argument("--order", type=_positive_int, default=DEFAULT_ORDER, metavar="N")
    s = ssub.add_parser("stirling", help="Stirling numbers of the second kind")
    s.add_argument("--gamma", required=True, type=int, metavar="G")

    p = sub.add_parser("verify", help="run the cross-oracle suites")
    chain_args(p)
    p.add_argument("--kmax", type=_nonnegative_int, default=DEFAULT_KMAX, metavar="K")
    p.add_argument("--order", type=_positive_int, default=DEFAULT_ORDER, metavar="N")
    p.add_argument("--terms", type=_positive_int, default=DEFAULT_TERMS, metavar="N")
    p.add_argument("--cap", type=_nonnegative_int, metavar="C")
    p.add_argument("--delta", default="1/100", metavar="D")
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    if hasattr(sys, "set_int_max_str_digits"):
        # exact rationals routinely exceed the default 4300-digit limit
        sys.set_int_max_str_digits(0)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args, out)
        if args.command == "alphabeta":
            return cmd_alphabeta(args, out)
        if args.command == "criterion":
            return cmd_criterion(args, out, argv)
        if args.command == "series":
            return cmd_series(args, out, argv)
        return cmd_verify(args, out, argv)
    except (SpecFileError, InvalidChainError) as exc:
        err.write(f"bdchain: {exc}\n")
        return EXIT_SPEC
    except NoPositiveSolutionError as exc:
        err.write(f"bdchain: {exc} (the positive-solution criterion needs a positive solution below K)\n")
        return EXIT_POSITIVITY
    except DomainError as exc:
        err.write(f"bdchain: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
