"""Command-line front end.

JSON reports go to stdout, a one-line summary to stderr.  Exit status is 0
on success, 1 on a domain error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any, Sequence

from . import __version__
from . import languages as L
from .certificates import (
    containment_certify,
    inpeqsize_certify,
    tree_certify,
    universal_certify,
)
from .errors import LocalDError
from .experiments import (
    DECIDERS,
    KINDS,
    ExperimentConfig,
    make_decider,
    oracle_sweep,
    pool_assignments,
    report_to_csv,
    run_experiment,
    shipped_locality_cases,
    locality_check,
    splitter_sweep,
)
from .jsonio import canonical_dumps, config_from_json, config_to_json
from .reductions import reduce_to_containment, reduce_to_cover
from .runtime import estimate_acceptance, run

log = logging.getLogger("locald")

SCHEMES = {
    "tree": ("tree-verifier", lambda config, ids, lang: tree_certify(config, ids)),
    "universal": ("universal", lambda config, ids, lang: universal_certify(config, ids)),
    "containment": ("containment-verifier", lambda config, ids, lang: containment_certify(config)),
    "inpeqsize": ("inpeqsize-verifier", lambda config, ids, lang: inpeqsize_certify(config)),
}

SWEEPS = ("oracle", "splitter", "locality")


class UsageError(Exception):
    pass


def _read_graph(path: str):
    try:
        if path == "-":
            doc = json.load(sys.stdin)
        else:
            with open(path) as fh:
                doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    return config_from_json(doc)


def _params(args) -> dict[str, Any]:
    params: dict[str, Any] = {}
    if getattr(args, "params", None):
        try:
            params = json.loads(args.params)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--params is not valid JSON: {exc}") from None
        if not isinstance(params, dict):
            raise UsageError("--params must be a JSON object")
    for key in ("p", "q", "lang", "radius", "tstar", "t", "n"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    return params


def _seed(args) -> int:
    env = os.environ.get("LOCALD_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"LOCALD_SEED must be an integer, got {env!r}") from None
    return args.seed


def _decider(name: str, params: dict[str, Any]):
    try:
        return make_decider(name, params)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def _emit(doc: Any, summary: str, csv_out: bool = False) -> None:
    if csv_out:
        sys.stdout.write(report_to_csv(doc))
    else:
        sys.stdout.write(canonical_dumps(doc) + "\n")
    print(summary, file=sys.stderr)


# -- subcommands ---------------------------------------------------------------


def cmd_run(args) -> int:
    config, ids, cert = _read_graph(args.graph)
    alg = _decider(args.decider, _params(args))
    result = run(alg, config, ids, cert, seed=_seed(args), round_cap=args.round_cap)
    doc = result.to_json()
    _emit(doc, f"{alg.name}: {doc.get('verdict', 'done')} in {max(result.rounds_used)} round(s)")
    return 0


def cmd_estimate(args) -> int:
    config, ids, cert = _read_graph(args.graph)
    alg = _decider(args.decider, _params(args))
    est = estimate_acceptance(alg, config, ids, cert, args.trials, _seed(args), args.workers, args.round_cap)
    _emit(est.to_json(), f"{alg.name}: acceptance {est.point:.4f} [{est.interval[0]:.4f}, {est.interval[1]:.4f}]")
    return 0


def cmd_certify(args) -> int:
    config, ids, _ = _read_graph(args.graph)
    _, certify = SCHEMES[args.scheme]
    cert = certify(config, ids, args.lang)
    _emit(config_to_json(config, ids, cert.values), f"{args.scheme}: certified {config.n} node(s)")
    return 0


def cmd_verify(args) -> int:
    config, ids, cert = _read_graph(args.graph)
    if cert is None:
        raise UsageError("verify needs a graph document with certificates")
    name, _ = SCHEMES[args.scheme]
    params = _params(args)
    alg = _decider(name, params)
    result = run(alg, config, ids, cert, seed=_seed(args))
    _emit(result.to_json(), f"{args.scheme}: {result.verdict}")
    return 0 if result.accepted or not args.strict else 1


def cmd_reduce(args) -> int:
    if not args.lang:
        raise UsageError("reduce needs --lang")
    config, ids, _ = _read_graph(args.graph)
    lang = L.get(args.lang)
    if args.target == "cover":
        image = reduce_to_cover(lang, config, ids, args.cap)
    else:
        image = reduce_to_containment(lang, args.t, config, ids, args.cap)
    target = L.get(args.target)
    doc = config_to_json(image, ids)
    doc["member"] = target.member(image)
    _emit(doc, f"{lang.name} -> {args.target}: image member = {doc['member']}")
    return 0


def cmd_experiment(args) -> int:
    params = _params(args)
    if args.leaders:
        params["leaders"] = args.leaders
    config = ExperimentConfig(args.kind, params, _seed(args), args.trials)
    report = run_experiment(config)
    _emit(report, f"experiment {args.kind}: done ({report['provenance']['config_hash'][:12]})", args.csv)
    return 0


def cmd_sweep(args) -> int:
    params = _params(args)
    if args.kind == "oracle":
        lang = L.get(params.get("lang", args.decider if args.decider in L.REGISTRY else "coloring"))
        alg = _decider(args.decider, params)
        alphabet = tuple(args.alphabet) if args.alphabet else lang.alphabet
        doc = oracle_sweep(alg, lang, args.max_n, alphabet, pool_assignments if args.id_pool else None)
        summary = f"oracle sweep: {doc['mismatches']} mismatch(es) in {doc['runs']} run(s)"
    elif args.kind == "splitter":
        lang = L.get(params.get("lang", "coloring"))
        alphabet = tuple(args.alphabet) if args.alphabet else lang.alphabet
        doc = splitter_sweep(lang, args.max_n, alphabet, int(params.get("radius", 2)))
        summary = f"splitter sweep: {doc['violations']} violation(s)"
    else:
        cases = shipped_locality_cases()
        names = [args.decider] if args.decider in cases else list(cases)
        doc = {name: locality_check(cases[name], args.trials, args.max_n, _seed(args)) for name in names}
        summary = f"locality: {sum(d['violations'] for d in doc.values())} violation(s)"
    _emit(doc, summary, args.csv)
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="locald", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"locald {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=True, seed=True):
        if graph:
            p.add_argument("--graph", required=True, help="graph JSON file, or - for stdin")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="base seed (LOCALD_SEED overrides)")
        p.add_argument("--params", help="JSON object of algorithm parameters")
        p.add_argument("--p", type=float)
        p.add_argument("--q", type=float)
        p.add_argument("--lang")

    p = sub.add_parser("run", help="simulate one run of a decider")
    common(p)
    p.add_argument("--decider", required=True, choices=DECIDERS)
    p.add_argument("--round-cap", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("--tstar", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("estimate", help="Monte Carlo acceptance probability")
    common(p)
    p.add_argument("--decider", required=True, choices=DECIDERS)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--round-cap", type=int)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("certify", help="honest certificate for a member")
    common(p, seed=False)
    p.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="run a certificate verifier")
    common(p)
    p.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    p.add_argument("--strict", action="store_true", help="exit 1 when the verifier rejects")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="local reduction to cover or containment")
    common(p, seed=False)
    p.add_argument("--target", choices=("cover", "containment"), default="cover")
    p.add_argument("--t", type=int, default=1, help="view radius for containment")
    p.add_argument("--cap", type=int, default=4, help="truncation bound for psi")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("experiment", help="run a packaged experiment")
    common(p, graph=False)
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--leaders", type=int, nargs="+")
    p.add_argument("--t", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--csv", action="store_true", help="emit a flat CSV projection instead of JSON")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sweep", help="exhaustive or randomized property sweeps")
    common(p, graph=False)
    p.add_argument("--kind", required=True, choices=SWEEPS)
    p.add_argument("--decider", default="coloring")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--alphabet", nargs="+")
    p.add_argument("--id-pool", action="store_true", help="also vary identities over a 3-id pool")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--radius", type=int)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"locald: error: {exc}", file=sys.stderr)
        return 2
    except (LocalDError, KeyError, ValueError) as exc:
        print(f"locald: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
