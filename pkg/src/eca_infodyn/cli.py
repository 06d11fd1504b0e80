"""Command-line entry point: ``eca-infodyn {evolve,classify,coarse-grain}``.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import __version__
from .classifier import (
    DEFAULT_SEED,
    ClassificationThresholds,
    ExperimentConfig,
    classify,
    empty_region_violations,
    load_reference_classes,
    random_input,
    reference_mismatches,
    single_cell_input,
    structured_input,
)
from .coarse import N_MAX_LIMIT, build_transition_graph, validate_hierarchy
from .entropy import TEConfig
from .persist import (
    change_points_csv,
    classification_csv,
    config_from_dict,
    config_to_dict,
    edge_list_text,
    field_to_bytes,
    field_to_text,
    hierarchy_report,
    random_points_csv,
    read_classification,
    read_manifest,
    single_cell_points_csv,
    write_manifest,
    write_text,
)
from .rules import evolve, representative
from .seeding import PRNG_ID, SEED_MIXER_ID, derive_seed
from .validation import check_rule

THREADS_ENV = "ECA_INFODYN_THREADS"
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rule_arg(text: str) -> int:
    try:
        return check_rule(int(text))
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
    p.add_argument("--width", type=int, default=101)
    p.add_argument("--steps", type=int, default=250)
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker processes (fallback: ${THREADS_ENV}, then 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eca-infodyn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("evolve", help="write a space-time field")
    ev.add_argument("--rule", type=_rule_arg, required=True)
    ev.add_argument("--input", choices=("single", "random", "density"), default="single")
    ev.add_argument("--n-black", type=int, default=2, help="black cells for --input density")
    ev.add_argument("--input-index", type=int, default=0,
                    help="ensemble index used to derive the input seed")
    ev.add_argument("--format", choices=("text", "binary"), default="text")
    ev.add_argument("--out", default="-", help="output file, '-' for stdout (text only)")
    _add_common(ev)

    cl = sub.add_parser("classify", help="information classes of the 88 representatives")
    group = cl.add_mutually_exclusive_group()
    group.add_argument("--rule", type=_rule_arg, action="append",
                       help="restrict the ensemble pass to these rules (repeatable)")
    group.add_argument("--all", action="store_true", help="all representatives (default)")
    cl.add_argument("--input", choices=("random", "density"), default="random",
                    help="ensemble of complex inputs")
    cl.add_argument("--n-inputs", type=int, default=20)
    cl.add_argument("--burn-in", type=int, default=50)
    cl.add_argument("--k", type=int, default=TEConfig.k, help="target history length")
    cl.add_argument("--l", type=int, default=TEConfig.l, help="source history length")
    cl.add_argument("--bias-correction", action="store_true")
    cl.add_argument("--te-threshold", type=float, default=None,
                    help="fixed threshold in bits instead of the Wolfram I/II maximum")
    cl.add_argument("--from-manifest", default=None,
                    help="re-run the experiment recorded in a manifest")
    cl.add_argument("--out", default="results")
    _add_common(cl)

    cg = sub.add_parser("coarse-grain", help="search exact coarse-graining transitions")
    group = cg.add_mutually_exclusive_group(required=True)
    group.add_argument("--rule", type=_rule_arg, action="append")
    group.add_argument("--all", action="store_true")
    cg.add_argument("--n-max", type=int, default=3)
    cg.add_argument("--deep-rule", type=_rule_arg, action="append", default=[],
                    help=f"search this rule up to N={N_MAX_LIMIT} (repeatable)")
    cg.add_argument("--show-zero", action="store_true", help="keep edges into rule 0")
    cg.add_argument("--include-trivial", action="store_true", help="allow constant projections")
    src = cg.add_mutually_exclusive_group()
    src.add_argument("--classification", default=None,
                     help="classification CSV to validate the hierarchy against")
    src.add_argument("--reference", action="store_true",
                     help="validate against the bundled reference classes")
    cg.add_argument("--out", default="results")
    return parser


def _threads(value: int | None) -> int:
    if value is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                value = int(env)
            except ValueError:
                raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        else:
            value = 1
    if value < 1:
        raise UsageError("--threads must be >= 1")
    return value


def _echo_canonical(rules) -> None:
    for r in rules:
        rep = representative(r)
        if rep != r:
            print(f"rule {r} -> representative {rep}", file=sys.stderr)


def cmd_evolve(args) -> int:
    rep = representative(args.rule)
    seed = derive_seed(args.seed, rep, args.input_index)
    try:
        if args.input == "single":
            cells = single_cell_input(args.width)
        elif args.input == "random":
            cells = random_input(args.width, seed)
        else:
            cells = structured_input(args.width, args.n_black, seed)
        field = evolve(cells, args.rule, args.steps)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None

    if args.format == "binary":
        if args.out == "-":
            raise UsageError("binary output needs --out FILE")
        Path(args.out).write_bytes(field_to_bytes(field))
    elif args.out == "-":
        sys.stdout.write(field_to_text(field))
    else:
        Path(args.out).write_text(field_to_text(field))
    return 0


def _config_from_args(args) -> tuple[ExperimentConfig, list[int] | None]:
    if args.from_manifest:
        manifest = read_manifest(args.from_manifest)
        return config_from_dict(manifest["config"]), manifest.get("rules")
    try:
        cfg = ExperimentConfig(
            width=args.width,
            steps=args.steps,
            burn_in=args.burn_in,
            n_inputs=args.n_inputs,
            ensemble=args.input,
            te_config=TEConfig(args.k, args.l, args.bias_correction),
            master_seed=args.seed,
            thresholds=ClassificationThresholds(te_threshold=args.te_threshold),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    rules = sorted({representative(r) for r in args.rule}) if args.rule else None
    return cfg, rules


def cmd_classify(args) -> int:
    cfg, rules = _config_from_args(args)
    n_jobs = _threads(args.threads)
    if args.rule:
        _echo_canonical(args.rule)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    started = time.time()
    records, theta = classify(cfg, n_jobs=n_jobs, rules=rules)
    finished = time.time()

    digests = {
        "classification.csv": write_text(out / "classification.csv", classification_csv(records)),
        "fig1a_single_cell.csv": write_text(out / "fig1a_single_cell.csv", single_cell_points_csv(records)),
        "fig1b_random.csv": write_text(out / "fig1b_random.csv", random_points_csv(records)),
        "fig2_change.csv": write_text(out / "fig2_change.csv", change_points_csv(records)),
    }
    te = cfg.te_config
    manifest = {
        "tool": "eca-infodyn",
        "version": __version__,
        "config": config_to_dict(cfg),
        "rules": rules,
        "master_seed": cfg.master_seed,
        "prng": PRNG_ID,
        "seed_mixer": SEED_MIXER_ID,
        "per_input_seeds": {str(r.representative): list(r.seeds) for r in records},
        "estimator": {
            "kind": "plug-in",
            "k": te.k,
            "l": te.l,
            "bias_correction": te.bias_correction,
            "samples_per_pair": cfg.steps + 1 - cfg.burn_in - te.lag,
        },
        "te_threshold_bits": theta,
        "started": started,
        "finished": finished,
        "outputs": digests,
    }
    write_manifest(out / "manifest.json", manifest)

    counts = {c: sum(r.info_class == c for r in records) for c in ("I1", "I2", "I3")}
    print(f"threshold {theta:.5f} bits; classes " + ", ".join(f"{c}={n}" for c, n in counts.items()))
    print(f"empty-region violations: {len(empty_region_violations(records, theta, cfg.thresholds.change_threshold))}")
    mismatches = reference_mismatches(records)
    reference = load_reference_classes()
    print(f"reference mismatches: {len(mismatches)}")
    for r in mismatches:
        print(f"  rule {r.representative}: {r.info_class} (reference {reference[r.representative]}) "
              f"te1={r.te1:.5f} max_change={r.max_change:.3f}")
    return 0


def cmd_coarse_grain(args) -> int:
    if not 2 <= args.n_max <= N_MAX_LIMIT:
        raise UsageError(f"--n-max must lie in [2, {N_MAX_LIMIT}]")
    classification = None
    if args.classification:
        path = Path(args.classification)
        if not path.exists():
            raise FileNotFoundError(f"classification CSV not found: {path}")
        classification = read_classification(path)
    elif args.reference:
        classification = load_reference_classes()

    rules = None
    if args.rule:
        _echo_canonical(args.rule)
        rules = sorted(set(args.rule) | set(args.deep_rule))
    overrides = {representative(r): N_MAX_LIMIT for r in args.deep_rule}
    graph = build_transition_graph(args.n_max, args.include_trivial, rules, overrides)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_text(out / "edges.csv", edge_list_text(graph, args.show_zero))
    shown = graph.edge_list(args.show_zero, self_loops=False)
    print(f"{len(shown)} transitions between representatives "
          f"({sum(len(graph.edges[e]) for e in graph.edge_list(args.show_zero))} witnesses)")
    if classification is not None:
        violations = validate_hierarchy(graph, classification)
        report = hierarchy_report(graph, violations, classification)
        write_text(out / "hierarchy.txt", report)
        sys.stdout.write(report)
    return 0


COMMANDS = {"evolve": cmd_evolve, "classify": cmd_classify, "coarse-grain": cmd_coarse_grain}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"eca-infodyn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"eca-infodyn: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
