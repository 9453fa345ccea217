"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import sys

from eemx.dataset import load_csv, resolve_path
from eemx.errors import DataError, EemxError, UsageError
from eemx.fixtures import KINDS, FixtureSpec
from eemx.indices import model_index_report
from eemx.model_space import DEFAULT_BUDGET, ControlParams
from eemx.pipeline import i_screen, run_pipeline
from eemx.report import dumps, fmt, index_table_text, render_text, screen_text, table, to_json, variable_dict
from eemx.simulate import SimConfig, pcc_frequency_study

CRITERIA = ("aic", "bic", "adjr2", "rse")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _add_thresholds(p: argparse.ArgumentParser):
    g = p.add_argument_group("thresholds")
    g.add_argument("--cq", type=float, help="bound on q^2 (default 0.9)")
    g.add_argument("--dr", type=float, help="bound on the collinearity CD (default 0.9)")
    g.add_argument("--c", type=float, help="I-index level, alternative to --cq")
    g.add_argument("--d", type=float, help="C-index level, alternative to --dr")
    g.add_argument("--a", type=float, default=0.9, help="collinearity identifier threshold (default 0.9)")
    g.add_argument("--b", type=float, default=0.4, help="component share threshold (default 0.4)")
    g.add_argument("--e-norm", type=float, help="lower bound on column norms")


def _add_common(p: argparse.ArgumentParser, need_file=True):
    if need_file:
        p.add_argument("file", help="CSV file or name of a bundled dataset")
        p.add_argument("--response", help="response column, removed from the design")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eemx", description="Inefficiency and collinearity controlled model selection.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("indices", help="per-variable index table of the full design")
    _add_common(p)

    p = sub.add_parser("screen", help="drop variables with large q^2")
    _add_common(p)
    _add_thresholds(p)

    for name, help_ in (("select", "select the IC-controlled class"), ("score", "select and rank by a criterion")):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        _add_thresholds(p)
        p.add_argument("--algo", choices=("vi", "vr", "brute"), default="vi")
        p.add_argument("--criterion", choices=CRITERIA, default="adjr2")
        p.add_argument("--max-enum", type=_count, default=DEFAULT_BUDGET, help="enumeration budget")

    p = sub.add_parser("simulate", help="frequency study of the leading collinearity class")
    p.add_argument("--phi", required=True, help="CSV correlation matrix with a header row of names")
    p.add_argument("--n", type=_count, default=50)
    p.add_argument("--trials", type=_count, default=1000)
    p.add_argument("--a", type=float, default=0.9)
    p.add_argument("--b", type=float, default=0.4)
    p.add_argument("--seed", type=_u64, default=0)
    _add_common(p, need_file=False)

    p = sub.add_parser("fixtures", help="write a synthetic design as CSV")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--n", type=_count, default=10)
    p.add_argument("--k", type=_count, default=4, help="design columns including the intercept")
    p.add_argument("--param", type=float, default=0.0, help="noise or epsilon")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", help="output path (default stdout)")
    return parser


def _params(args) -> ControlParams:
    return ControlParams.resolve(c_q=args.cq, d_R=args.dr, c=args.c, d=args.d, a=args.a, b=args.b, e_norm=args.e_norm)


def _load(args):
    return load_csv(resolve_path(args.file), args.response)


def _cmd_indices(args) -> str:
    ds = _load(args)
    it = model_index_report(ds.design, list(ds.names))
    if args.format == "json":
        return dumps(
            {
                "dataset_id": ds.id,
                "variables": [variable_dict(r) for r in it.per_variable],
                "icri": list(it.icri),
                "mean_h": it.mean_h,
            }
        )
    return f"dataset {ds.id}\n{index_table_text(it)}\n"


def _cmd_screen(args) -> str:
    ds = _load(args)
    params = _params(args)
    sc = i_screen(ds, params.c_q, params.e_norm)
    if args.format == "json":
        return dumps(
            {
                "dataset_id": ds.id,
                "c_q": sc.c_q,
                "survivors": [ds.names[c] for c in sc.survivors.columns],
                "dropped": [{"name": d.name, "reason": d.reason, "value": d.value} for d in sc.dropped],
            }
        )
    return screen_text(sc, ds.names) + "\n"


def _cmd_select(args, score: bool) -> str:
    ds = _load(args)
    if score and ds.response is None:
        raise UsageError("score needs --response")
    report = run_pipeline(ds, _params(args), args.algo, args.criterion, args.max_enum, score=score)
    return to_json(report) if args.format == "json" else render_text(report)


def _read_phi(path):
    ds = load_csv(resolve_path(path))
    phi = ds.design[:, 1:]
    return phi, ds.names[1:]


def _cmd_simulate(args) -> str:
    phi, names = _read_phi(args.phi)
    cfg = SimConfig(phi, args.n, args.trials, args.a, args.b, args.seed, tuple(names))
    ft = pcc_frequency_study(cfg)
    if args.format == "json":
        return dumps(
            {
                "n": cfg.n,
                "trials": cfg.trials,
                "a": cfg.a,
                "b": cfg.b,
                "seed": cfg.seed,
                "rows": [{"members": list(k), "count": v} for k, v in ft.rows.items()],
                "classes_checked": ft.classes_checked,
                "bound_failures": ft.bound_failures,
            }
        )
    rows = [["{" + ", ".join(k) + "}", v] for k, v in ft.rows.items()]
    head = f"n = {cfg.n}  trials = {cfg.trials}  a = {fmt(cfg.a)}  b = {fmt(cfg.b)}  seed = {cfg.seed}"
    return f"{head}\n{table(['leading class', 'count'], rows)}\n"


def _cmd_fixtures(args) -> str:
    x = FixtureSpec(args.kind, args.n, args.k, args.param, args.seed).build()
    names = [f"x{j}" for j in range(1, x.shape[1])]
    lines = [",".join(names)] + [",".join(repr(float(v)) for v in row[1:]) for row in x]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        return ""
    return text


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "indices":
            out = _cmd_indices(args)
        elif args.command == "screen":
            out = _cmd_screen(args)
        elif args.command in ("select", "score"):
            out = _cmd_select(args, args.command == "score" or args.response is not None)
        elif args.command == "simulate":
            out = _cmd_simulate(args)
        else:
            out = _cmd_fixtures(args)
    except EemxError as exc:
        print(f"eemx: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"eemx: error: {exc}", file=sys.stderr)
        return DataError.exit_code
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
