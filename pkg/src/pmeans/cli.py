"""Command-line interface: every subsystem as a reproducible subcommand.

Subcommands: sample, eppf, ecpf, kn, crp, moments, density, transform,
figure, verify.  Seeded subcommands are deterministic end to end (same
seed, byte-identical output).  Table outputs carry a header naming the
identity they tabulate; records carry a schema version field.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import figures, pmean, verify
from .discrete import AlphaTheta, gem_stick_break, dirichlet_finite, subordinator_increments
from .partition import Composition, crp_sample, ecpf, ecpf_uniform, eppf, kn_distribution
from .pmean import AtomicDistribution
from .sampling import RngStream
from .specialfn import (
    SeriesConvergenceError,
    SeriesControl,
    stable_pdf,
    stable_ratio_pdf,
    talzol_pdf,
)

SCHEMA = 1


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _parse_ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v != ""]


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:n, got {text!r}") from exc


class _Table:
    """A titled column table, serializable as commented CSV or JSON."""

    def __init__(self, identity: str, columns: list[str], rows: list[tuple],
                 meta: dict | None = None):
        self.identity = identity
        self.columns = columns
        self.rows = rows
        self.meta = meta or {}

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(
                {
                    "schema": SCHEMA,
                    "identity": self.identity,
                    **self.meta,
                    "columns": self.columns,
                    "rows": [list(r) for r in self.rows],
                }
            )
        buf = io.StringIO()
        buf.write(f"# schema: {SCHEMA}\n")
        buf.write(f"# identity: {self.identity}\n")
        for k, v in self.meta.items():
            buf.write(f"# {k}: {v}\n")
        buf.write(",".join(self.columns) + "\n")
        for r in self.rows:
            buf.write(",".join(_fmt_cell(v) for v in r) + "\n")
        return buf.getvalue().rstrip("\n")


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _alpha_theta(args) -> AlphaTheta:
    return AlphaTheta(args.alpha, args.theta)


def _x_from_args(args) -> AtomicDistribution:
    if getattr(args, "bernoulli", None) is not None:
        return AtomicDistribution.bernoulli(args.bernoulli)
    if getattr(args, "values", None) is not None:
        if getattr(args, "probs", None) is None:
            raise SystemExit("--values requires --probs")
        return AtomicDistribution(_parse_floats(args.values), _parse_floats(args.probs))
    raise SystemExit("specify the X law with --bernoulli P or --values/--probs")


# ----------------------------------------------------------------------


def _cmd_sample(args) -> int:
    rng = RngStream(args.seed)
    lines = []
    for _ in range(args.samples):
        if args.model == "gem":
            s = gem_stick_break(AlphaTheta(args.alpha, args.theta), args.trunc_tol, rng)
        elif args.model == "stable_jumps":
            s = gem_stick_break(AlphaTheta(args.alpha, 0.0), args.trunc_tol, rng)
        elif args.model == "dirichlet":
            s = dirichlet_finite(_parse_floats(args.theta_list), rng)
        else:  # subordinator
            s = subordinator_increments(
                args.kind, _parse_floats(args.lengths), rng, alpha=args.alpha
            )
        rec = {"schema": SCHEMA, **json.loads(s.to_json())}
        lines.append(json.dumps(rec))
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_eppf(args) -> int:
    c = Composition(_parse_ints(args.composition))
    value = eppf(_alpha_theta(args), c)
    _emit(json.dumps({"schema": SCHEMA, "value": value}), args.out)
    return 0


def _cmd_ecpf(args) -> int:
    c = Composition(_parse_ints(args.composition))
    if args.uniform_m is not None:
        value = ecpf_uniform(args.uniform_m, c)
    else:
        value = ecpf(_alpha_theta(args), c)
    _emit(json.dumps({"schema": SCHEMA, "value": value}), args.out)
    return 0


def _cmd_kn(args) -> int:
    if args.uniform_m is not None:
        provider = lambda c: ecpf_uniform(args.uniform_m, c)  # noqa: E731
        identity = "P(K_n=k) = sum over k-part compositions of (1/m)^n binom(m,k) multinomial(n;parts)"
    else:
        params = _alpha_theta(args)
        provider = lambda c: ecpf(params, c)  # noqa: E731
        identity = "P(K_n=k) = sum over k-part compositions of the two-parameter ECPF"
    dist = kn_distribution(provider, args.n)
    table = _Table(identity, ["k", "prob"], list(enumerate(dist, start=1)))
    _emit(table.render(args.format), args.out)
    return 0


def _cmd_crp(args) -> int:
    rng = RngStream(args.seed)
    params = _alpha_theta(args)
    lines = []
    for _ in range(args.samples):
        state = crp_sample(params, args.n, rng)
        lines.append(json.dumps({"schema": SCHEMA, "blocks": state.block_sizes}))
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_moments(args) -> int:
    x = _x_from_args(args)
    mx = x.moment_vector(args.order)
    if args.uniform_m is not None:
        out = pmean.classical_mean_moments(args.uniform_m, mx, args.order)
        identity = "E M^n for the arithmetic mean of m i.i.d. draws (composition sum)"
    else:
        params = _alpha_theta(args)
        out = pmean.exact_pmean_moments(
            lambda c: ecpf(params, c), mx, args.order
        )
        identity = "E M^n = sum over compositions of ECPF * prod of X moments"
    rows = [(j, v) for j, v in enumerate(out.moments, start=1)]
    _emit(_Table(identity, ["order", "moment"], rows).render(args.format), args.out)
    return 0


_DENSITIES = {
    "talzol": (
        "f(s) = sin(a pi) / (2 pi a (cos(a pi) + cosh s))",
        "-8:8:321",
    ),
    "stable": (
        "density of T with E exp(-l T) = exp(-l^a), by the alternating series",
        "0.5:10:191",
    ),
    "stable_ratio": (
        "f(r) = sin(a pi)/pi * r^(a-1) / (1 + 2 r^a cos(a pi) + r^(2a))",
        "0.01:3:300",
    ),
    "darling_lamperti": (
        "occupation density p q sin(a pi) u^(a-1)(1-u)^(a-1) / (pi [q^2 u^2a"
        " + 2pq(u(1-u))^a cos(a pi) + p^2 (1-u)^2a])",
        "0.005:0.995:199",
    ),
}


def _cmd_density(args) -> int:
    identity, default_grid = _DENSITIES[args.which]
    grid = args.grid if args.grid is not None else _parse_grid(default_grid)
    ctl = SeriesControl(abs_tol=args.abs_tol, max_terms=args.max_terms)
    rows = []
    for g in grid:
        g = float(g)
        try:
            if args.which == "talzol":
                v = talzol_pdf(args.alpha, g)
            elif args.which == "stable":
                v = stable_pdf(args.alpha, g, ctl)
            elif args.which == "stable_ratio":
                v = stable_ratio_pdf(args.alpha, g)
            else:
                v = pmean.darling_lamperti_pdf(args.alpha, args.p, g)
        except SeriesConvergenceError:
            v = math.nan
        rows.append((g, v))
    meta = {"alpha": args.alpha}
    if args.which == "darling_lamperti":
        meta["p"] = args.p
    _emit(_Table(identity, ["grid", "density"], rows, meta).render(args.format), args.out)
    return 0


def _cmd_transform(args) -> int:
    lams = _parse_floats(args.lam)
    if args.which == "cs":
        x = _x_from_args(args)
        params = _alpha_theta(args)
        rows = [(lam, pmean.cs_transform_rhs(params, x, lam)) for lam in lams]
        identity = "E (1 + lam M)^-theta = (E (1 + lam X)^alpha)^(-theta/alpha)"
        cols = ["lam", "value"]
    elif args.which == "dirichlet_log":
        x = _x_from_args(args)
        rows = [(lam, pmean.dirichlet_log_transform(args.theta, x, lam)) for lam in lams]
        identity = "E (1 + lam M)^-theta = exp(-theta E log(1 + lam X))"
        cols = ["lam", "value"]
    elif args.which == "alpha0":
        x = _x_from_args(args)
        rows = [(lam, *pmean.alpha0_transform(args.alpha, x, lam)) for lam in lams]
        identity = (
            "E log(1 + lam M) = log(E (1 + lam X)^alpha)/alpha;"
            " E (1 + lam M)^-1 = E (1+lam X)^(alpha-1) / E (1+lam X)^alpha"
        )
        cols = ["lam", "log_form", "stieltjes_form"]
    else:  # lamperti
        rows = [(lam, pmean.lamperti_stieltjes(args.alpha, args.p, lam)) for lam in lams]
        identity = "E (1 + lam M)^-1 = (q + p(1+lam)^(a-1)) / (q + p(1+lam)^a)"
        cols = ["lam", "value"]
    _emit(_Table(identity, cols, rows).render(args.format), args.out)
    return 0


def _cmd_figure(args) -> int:
    if args.name == "ratio_densities":
        rows = figures.ratio_density_table(args.points)
        table = _Table(
            "densities of R^alpha and R for alpha = k/8: sin(a pi)/(a pi (1+2x cos(a pi)+x^2))"
            " and sin(a pi)/pi r^(a-1)/(1+2 r^a cos(a pi)+r^(2a))",
            ["alpha", "variable", "grid", "density"],
            rows,
        )
    else:
        ac = figures.alpha_critical()
        rows = figures.discriminant_table(args.points)
        table = _Table(
            "half discriminant cos^2(a pi) + a^2 - 1 of (1+a)x^2 + 2x cos(a pi) + (1-a),"
            " and extremum loci r(a) = x(a)^(1/a)",
            ["alpha", "half_discriminant", "r_minus", "r_plus"],
            rows,
            meta={
                "alpha_critical": ac,
                "inflection_abscissa": figures.inflection_abscissa(ac),
            },
        )
    _emit(table.render(args.format), args.out)
    return 0


def _cmd_verify(args) -> int:
    if args.all:
        reports = verify.run_all(
            seed=args.seed, n_samples=args.samples, perturb=args.perturb
        )
    else:
        if not args.check:
            raise SystemExit("verify needs --check NAME or --all")
        cfg = {"seed": args.seed}
        if args.samples is not None:
            cfg["n_samples"] = args.samples
        if args.perturb:
            cfg["perturb"] = True
        reports = [verify.run_check(args.check, cfg)]
    _emit("\n".join(r.to_json() for r in reports), args.out)
    return 0 if all(r.passed for r in reports) else 1


# ----------------------------------------------------------------------


def _add_common(p, seed=False, samples=False):
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", default=None, help="write output to a file")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if samples:
        p.add_argument("--samples", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pmeans",
        description="random discrete distributions and their weighted averages",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("sample", help="draw weight sequences from a model")
    ps = p.add_subparsers(dest="model", required=True)
    for model in ("gem", "stable_jumps", "dirichlet", "subordinator"):
        q = ps.add_parser(model)
        _add_common(q, seed=True, samples=True)
        q.add_argument("--trunc-tol", type=float, default=1e-8, dest="trunc_tol")
        if model == "gem":
            q.add_argument("--alpha", type=float, required=True)
            q.add_argument("--theta", type=float, required=True)
        elif model == "stable_jumps":
            q.add_argument("--alpha", type=float, required=True)
        elif model == "dirichlet":
            q.add_argument("--theta", dest="theta_list", required=True,
                           help="comma-separated weights")
        else:
            q.add_argument("--kind", choices=("gamma", "stable"), required=True)
            q.add_argument("--lengths", required=True, help="comma-separated")
            q.add_argument("--alpha", type=float, default=None)
        q.set_defaults(func=_cmd_sample)

    p = sub.add_parser("eppf", help="two-parameter EPPF at a composition")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--composition", required=True, help="comma-separated parts")
    _add_common(p)
    p.set_defaults(func=_cmd_eppf)

    p = sub.add_parser("ecpf", help="composition probability at a composition")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--uniform-m", type=int, default=None, dest="uniform_m")
    p.add_argument("--composition", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_ecpf)

    p = sub.add_parser("kn", help="distribution of the number of distinct values")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--uniform-m", type=int, default=None, dest="uniform_m")
    _add_common(p)
    p.set_defaults(func=_cmd_kn)

    p = sub.add_parser("crp", help="sequential seating samples")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_common(p, seed=True, samples=True)
    p.set_defaults(func=_cmd_crp)

    p = sub.add_parser("moments", help="exact moments of a randomly weighted mean")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--uniform-m", type=int, default=None, dest="uniform_m")
    p.add_argument("--bernoulli", type=float, default=None)
    p.add_argument("--values", default=None)
    p.add_argument("--probs", default=None)
    p.add_argument("--order", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("density", help="tabulate a closed-form density")
    p.add_argument("--which", choices=tuple(_DENSITIES), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--grid", type=_parse_grid, default=None, help="lo:hi:n")
    p.add_argument("--abs-tol", type=float, default=1e-12, dest="abs_tol")
    p.add_argument("--max-terms", type=int, default=400, dest="max_terms")
    _add_common(p)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("transform", help="tabulate a closed-form transform")
    p.add_argument("--which", choices=("cs", "dirichlet_log", "alpha0", "lamperti"),
                   required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--bernoulli", type=float, default=None)
    p.add_argument("--values", default=None)
    p.add_argument("--probs", default=None)
    p.add_argument("--lam", default="0.5,1,2,4", help="comma-separated lambdas")
    _add_common(p)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("figure", help="data tables behind the ratio-density figures")
    p.add_argument("--name", choices=("ratio_densities", "discriminant"), required=True)
    p.add_argument("--points", type=int, default=257)
    _add_common(p)
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("verify", help="run named Monte Carlo identity checks")
    p.add_argument("--check", default=None, choices=verify.check_names())
    p.add_argument("--all", action="store_true")
    p.add_argument("--perturb", action="store_true",
                   help="shift the analytic target by 0.2 (sentinel mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
