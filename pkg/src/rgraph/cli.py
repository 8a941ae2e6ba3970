"""Command-line interface.

Every stochastic subcommand takes ``--seed`` (default 0) and records it,
with the rest of the resolved options, under ``"config"`` in its JSON
output. Graph outputs are plain edge lists; their config goes to a
``<output>.run.json`` sidecar (or to stderr when writing to stdout).

Exit status: 0 success, 1 invalid input or usage, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import estimation, fixed_degree, gof, models, spectral
from .errors import NumericalError, RGraphError, ValidationError
from .graph import load_graph, write_graph

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2
SEED_MAX = (1 << 64) - 1
MODELS = ("beta", "additive", "kbeta", "rank")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default; 2 is reserved for numerical failures
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _nonneg_int(text):
    value = int(text) if text.lstrip("-").isdigit() else None
    if value is None or value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("expected a positive number")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rgraph", description="Random graph models with given degrees or odds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def out_opt(sp):
        sp.add_argument("-o", "--output", help="write here instead of stdout")

    def seed_opt(sp):
        sp.add_argument("--seed", type=_seed, default=0, help="64-bit seed (default 0)")

    sp = sub.add_parser("gen", help="sample a graph from model parameters")
    sp.add_argument("--model", choices=MODELS, required=True)
    sp.add_argument("--params", required=True, help="parameter JSON file")
    seed_opt(sp)
    out_opt(sp)

    sp = sub.add_parser("fit", help="fit a model to a graph")
    sp.add_argument("graph")
    sp.add_argument("--model", choices=MODELS, required=True)
    sp.add_argument("--k", type=_positive_int, help="colors (kbeta without --labels) or rank")
    sp.add_argument("--labels", help="JSON labeling for kbeta: a list of colors 1..k")
    sp.add_argument("--restarts", type=_positive_int, default=20,
                    help="coloring restarts for kbeta without --labels")
    seed_opt(sp)
    out_opt(sp)

    sp = sub.add_parser("color", help="greedy ANOVA coloring")
    sp.add_argument("graph")
    sp.add_argument("--k", type=_positive_int, required=True)
    sp.add_argument("--restarts", type=_positive_int, default=20)
    seed_opt(sp)
    out_opt(sp)

    sp = sub.add_parser("gof", help="goodness-of-fit test")
    sp.add_argument("graph")
    sp.add_argument("--test", choices=("ks", "blocked", "mc"), required=True)
    sp.add_argument("--params", help="parameter JSON to test (ks, blocked); "
                                     "default: the fitted beta model")
    sp.add_argument("--blocks", type=_positive_int, default=gof.DEFAULT_BLOCKS)
    sp.add_argument("--stat", default="eig2", help="statistic for --test mc")
    sp.add_argument("--replicates", type=_positive_int, default=gof.DEFAULT_REPLICATES)
    sp.add_argument("--burn-in", type=_nonneg_int, help="chain burn-in steps (default 10 n^2)")
    sp.add_argument("--thin", type=_positive_int, help="steps between null draws (default n^2)")
    sp.add_argument("--method", choices=fixed_degree.SwapChain.METHODS, default="metropolis")
    sp.add_argument("--null-sample", action="store_true",
                    help="include the Monte Carlo null sample in the output")
    seed_opt(sp)
    out_opt(sp)

    sp = sub.add_parser("spectrum", help="adjacency spectrum and nontrivial eigenvalue count")
    sp.add_argument("graph")
    sp.add_argument("--threshold", type=_positive_float, default=spectral.DEFAULT_THRESHOLD)
    out_opt(sp)

    sp = sub.add_parser("dae", help="degree of average entropy of a parameter file")
    sp.add_argument("--params", required=True)
    out_opt(sp)

    sp = sub.add_parser("sample-deg", help="uniform graph with the degrees of the input graph")
    sp.add_argument("graph")
    sp.add_argument("--steps", type=_nonneg_int, help="chain steps (default 10 n^2)")
    sp.add_argument("--method", choices=fixed_degree.SwapChain.METHODS, default="metropolis")
    seed_opt(sp)
    out_opt(sp)
    return p


# -- helpers -----------------------------------------------------------------

def _emit_text(text, output):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc, output):
    _emit_text(json.dumps(doc, indent=2, sort_keys=False) + "\n", output)


def _emit_graph(g, config, output):
    _emit_text(write_graph(g), output)
    payload = json.dumps({"config": config}, indent=2) + "\n"
    if output:
        with open(output + ".run.json", "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stderr.write(payload)


def _load_params(path, model=None):
    params = models.load_params(path)
    name = models.params_to_dict(params)["model"]
    if model is not None and name != model:
        raise ValidationError(f"{path} holds {name!r} parameters, not {model!r}")
    return params


def _load_labels(path, n):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    if isinstance(doc, dict):
        doc = doc.get("labels")
    if not isinstance(doc, list) or len(doc) != n:
        raise ValidationError(f"{path}: expected a list of {n} colors")
    c = np.asarray(doc)
    if c.dtype.kind not in "iu":
        raise ValidationError(f"{path}: colors must be integers 1..k")
    return models.Labeling(c, int(c.max()) if c.size else 1)


def _config(args, **extra):
    cfg = {k.replace("_", "-"): v for k, v in vars(args).items() if k != "command"}
    cfg = {"subcommand": args.command, **cfg}
    cfg.update(extra)
    return cfg


# -- subcommands ---------------------------------------------------------------

def _cmd_gen(args):
    params = _load_params(args.params, args.model)
    g = models.sample_graph(params, seed=args.seed)
    _emit_graph(g, _config(args, n=g.n), args.output)


def _fit(args, g):
    extra = {}
    if args.model == "beta":
        return estimation.fit_beta_mle(g), extra
    if args.model == "additive":
        return estimation.fit_additive_ls(g), extra
    if args.model == "rank":
        if args.k is None:
            raise ValidationError("--k is required for the rank model")
        return estimation.fit_rank_ml(g, args.k, seed=args.seed), extra
    if args.labels is not None:
        labeling = _load_labels(args.labels, g.n)
    else:
        if args.k is None:
            raise ValidationError("kbeta needs --labels or --k")
        coloring = estimation.greedy_coloring(g, args.k, args.restarts, seed=args.seed)
        labeling = coloring.labeling
        extra["coloring_q"] = coloring.q
    return estimation.fit_kbeta_given_labels(g, labeling), extra


def _cmd_fit(args):
    g = load_graph(args.graph)
    result, extra = _fit(args, g)
    report = result.report()
    report.update(extra)
    params = models.params_to_dict(result.params)
    config = _config(args)
    if args.output:
        _emit_json(params, args.output)
        _emit_json({"report": report, "config": config}, args.output + ".report.json")
    else:
        _emit_json({"params": params, "report": report, "config": config}, None)


def _cmd_color(args):
    g = load_graph(args.graph)
    res = estimation.greedy_coloring(g, args.k, args.restarts, seed=args.seed)
    _emit_json({
        "labels": [int(x) for x in res.labeling.c],
        "k": res.labeling.k,
        "q": res.q,
        "restarts_used": res.restarts_used,
        "per_restart_q": [float(x) for x in res.per_restart_q],
        "config": _config(args),
    }, args.output)


def _model_matrix(args, g):
    if args.params is not None:
        params = _load_params(args.params)
        if models.probability_matrix(params).shape[0] != g.n:
            raise ValidationError("parameter file and graph disagree on n")
    else:
        params = estimation.fit_beta_mle(g).params
    return models.probability_matrix(params)


def _cmd_gof(args):
    g = load_graph(args.graph)
    if args.test == "mc":
        report = gof.mc_degree_test(
            g, args.stat, args.replicates, seed=args.seed, burn_in=args.burn_in,
            thin=args.thin, method=args.method,
        )
    else:
        pm = _model_matrix(args, g)
        if args.test == "blocked":
            report = gof.blocked_sums_test(g, pm, args.blocks)
        else:
            iu = np.triu_indices(g.n, 1)
            x = gof.uniform_transform(g.adjacency[iu].astype(int), pm[iu], seed=args.seed)
            report = gof.ks_uniform_test(x)
            report = gof.TestReport(report.test, report.statistic, report.p_value,
                                    0, args.seed, report.null_sample)
    doc = report.to_dict()
    if not args.null_sample and not isinstance(doc["null_sample"], str):
        doc["null_sample"] = []
    doc["config"] = _config(args)
    _emit_json(doc, args.output)


def _cmd_spectrum(args):
    rep = spectral.spectrum(load_graph(args.graph), args.threshold)
    doc = rep.to_dict()
    doc["config"] = _config(args)
    _emit_json(doc, args.output)


def _cmd_dae(args):
    params = _load_params(args.params)
    pm = models.probability_matrix(params)
    _emit_json({"dae": models.dae(pm), "config": _config(args)}, args.output)


def _cmd_sample_deg(args):
    g = load_graph(args.graph)
    steps = fixed_degree.DEFAULT_BURN_IN_FACTOR * g.n * g.n if args.steps is None else args.steps
    if steps > 0 and fixed_degree.meta_degree(g) == 0:
        sys.stderr.write("rgraph: warning: meta-degree is 0, the chain is frozen; "
                         "returning the input graph\n")
        out = g
    else:
        out = fixed_degree.swap_chain_sample(g, steps, seed=args.seed, method=args.method)
    _emit_graph(out, _config(args, steps=steps), args.output)


_COMMANDS = {
    "gen": _cmd_gen,
    "fit": _cmd_fit,
    "color": _cmd_color,
    "gof": _cmd_gof,
    "spectrum": _cmd_spectrum,
    "dae": _cmd_dae,
    "sample-deg": _cmd_sample_deg,
}


def run(argv=None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{exc}\n")
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    try:
        _COMMANDS[args.command](args)
    except NumericalError as exc:
        sys.stderr.write(f"rgraph: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (RGraphError, OSError) as exc:
        sys.stderr.write(f"rgraph: error: {exc}\n")
        return EXIT_INVALID
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
