import argparse
import json
import sys
import time

from core.artifacts import ArtifactWriter, save_json
from core.config import RunConfig
from core.errors import ChartBudgetExceeded, GrassmannError, InvalidParameters
from core.gamma import (Matroid, birationality_check, gamma_from_matroid, make_gamma, maximality_audit,
                        run_gamma_pipeline)
from core.indices import render_index
from core.metrics import certification_metrics, gamma_metrics, relation_metrics, round_table, tower_metrics
from core.plucker_model import ModelSystem
from core.points import EXHAUSTIVE_PRIME_LIMIT
from core.tower import run_full_tower
from core.verify import certify, input_singularities

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grassmann_blowup",
                                     description="Blowup tower of the Grassmannian chart model and Γ-schemes")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, required=True)
    common.add_argument("--n", type=int, required=True)
    common.add_argument("--m", required=True, help="chart index, e.g. 1,2 or 12")
    common.add_argument("--quotient-bound", type=int, default=3)
    common.add_argument("--out", default=None, help="output directory (default $GRASSMANN_BLOWUP_OUT or results)")
    common.add_argument("--verbose", action="store_true")

    tower = argparse.ArgumentParser(add_help=False)
    tower.add_argument("--lambda-o", default="all", help="all | first | explicit:i,j,...")
    tower.add_argument("--primes", default="3,5,7")
    tower.add_argument("--gate", default="nonempty", help="nonempty | always | empty | exact-budget:N")
    tower.add_argument("--max-charts", type=int, default=20000)
    tower.add_argument("--truncate-after", choices=["theta", "wp"], default=None)
    tower.add_argument("--no-prune", action="store_true")
    tower.add_argument("--exhaustive-threshold", type=int, default=14)
    tower.add_argument("--sample-budget", type=int, default=100000)
    tower.add_argument("--seed", type=int, default=0)
    tower.add_argument("--certificate-depth", type=int, default=2,
                       help="branching depth of the zero-propagation certificate")
    tower.add_argument("--jobs", type=int, default=1, help="joblib workers for gate decisions and certification")

    gamma = argparse.ArgumentParser(add_help=False)
    gamma.add_argument("--gamma", default=None, help="vanishing coordinates, e.g. 34,13")
    gamma.add_argument("--matroid", default=None, help="JSON file with a matroid")
    gamma.add_argument("--matroid-convention", choices=["rank", "intersection"], default="rank")

    sub.add_parser("relations", parents=[common], help="primary Plücker family and binomial systems")
    sub.add_parser("tower", parents=[common, tower], help="run the ϑ, ℘, ð blowup tower")
    sub.add_parser("gamma", parents=[common, tower, gamma], help="transform a Γ-scheme along the tower")
    verify = sub.add_parser("verify", parents=[common, tower, gamma], help="certify smoothness over F_p")
    verify.add_argument("--report", default=None, help="path of the report JSON (default <out>/report.json)")
    return parser


def cmd_relations(config: RunConfig, writer: ArtifactWriter) -> int:
    start = time.perf_counter()
    model = ModelSystem(config.d, config.n, config.m, config.quotient_bound)
    writer.json("relations.json", model.to_dict())
    df = writer.table("relations.csv", relation_metrics(model).to_dict("records"))
    writer.time("relations", time.perf_counter() - start)
    print(f"[relations] Gr({config.d},{config.n}), m={render_index(config.m)}: Υ={model.upsilon}")
    print(df[["k", "u", "rank", "terms"]].to_string(index=False))
    writer.manifest(config, "relations", "ok", {"upsilon": model.upsilon})
    return EXIT_OK


def _save_tower(run, writer: ArtifactWriter):
    manifest = run.to_manifest()
    manifest["charts"] = [run.charts[cid].to_dict() for cid in manifest["final_charts"]]
    writer.json("tower.json", manifest)
    writer.table("tower_summary.csv", round_table(run).to_dict("records"))
    writer.table("registry.csv", run.registry.to_rows())


def _tower(config: RunConfig, writer: ArtifactWriter):
    start = time.perf_counter()
    model = ModelSystem(config.d, config.n, config.m, config.quotient_bound)
    run = run_full_tower(model, config.tower_options(), config.lambda_o)
    writer.time("tower", time.perf_counter() - start)
    _save_tower(run, writer)
    return run


def _scheme(config: RunConfig, model: ModelSystem):
    if config.matroid_path:
        with open(config.matroid_path, "r", encoding="utf-8") as f:
            matroid = Matroid.from_dict(json.load(f), config.matroid_convention)
        if (matroid.d, matroid.n) != (config.d, config.n):
            raise InvalidParameters(f"matroid has rank {matroid.d} on [{matroid.n}], expected ({config.d},{config.n})")
        return gamma_from_matroid(matroid, config.m)
    return make_gamma(model, config.gamma)


def _gamma(config: RunConfig, writer: ArtifactWriter):
    run = _tower(config, writer)
    scheme = _scheme(config, run.model)
    start = time.perf_counter()
    result = run_gamma_pipeline(run, scheme, primes=config.primes, verbose=config.verbose, **config.point_options())
    writer.time("gamma", time.perf_counter() - start)
    writer.json("gamma.json", result.to_dict())
    writer.table("gamma.csv", gamma_metrics(result).to_dict("records"))
    return result


def cmd_tower(config: RunConfig, writer: ArtifactWriter) -> int:
    run = _tower(config, writer)
    counts = tower_metrics(run)
    for name, value in counts.items():
        print(f"  {name}: {value}")
    writer.manifest(config, "tower", "ok", {"stages": run.completed})
    return EXIT_OK


def cmd_gamma(config: RunConfig, writer: ArtifactWriter) -> int:
    result = _gamma(config, writer)
    status = "partial" if result.undecided() else "ok"
    writer.manifest(config, "gamma", status, {"active_charts": len(result.active())})
    return EXIT_PARTIAL if result.undecided() else EXIT_OK


def cmd_verify(config: RunConfig, writer: ArtifactWriter, report_path: str = None) -> int:
    result = _gamma(config, writer)
    model = result.run.model
    start = time.perf_counter()
    report = certify(result, config.primes, n_jobs=config.n_jobs, **config.point_options())
    writer.time("verify", time.perf_counter() - start)

    data = report.to_dict()
    small = [p for p in config.primes if p <= EXHAUSTIVE_PRIME_LIMIT]
    if small:
        singular = input_singularities(model, result.scheme, small[0], **config.point_options())
        data["input_singular_points"] = {"prime": small[0], "count": len(singular),
                                         "points": [{str(v): c for v, c in sorted(pt.items())} for pt in singular]}
        data["birationality"] = [birationality_check(result, p, **config.point_options()) for p in small]
        findings = maximality_audit(result, tuple(small), **config.point_options())
        data["maximality"] = {"primes": small, "maximal": not findings, "findings": findings}
        if findings:
            print(f"[verify] {len(findings)} unpinned variables vanish on every found point")
    if report_path:
        writer.hashes[report_path] = save_json(data, report_path)
    else:
        writer.json("report.json", data)
    df = writer.table("certification.csv", certification_metrics(report).to_dict("records"))
    print(df.to_string(index=False))
    print(f"[verify] {report.verdict}")
    writer.manifest(config, "verify", report.verdict.lower(), {"verdict": report.verdict})
    return {"PASS": EXIT_OK, "FAIL": EXIT_FAIL}.get(report.verdict, EXIT_PARTIAL)


COMMANDS = {"relations": cmd_relations, "tower": cmd_tower, "gamma": cmd_gamma, "verify": cmd_verify}


def main(argv=None) -> int:
    """
    Розбирає аргументи, перевіряє конфігурацію і запускає підкоманду.

    :return: Код виходу: 0 успіх/PASS, 1 FAIL, 2 помилка параметрів, 3 частковий результат.
    """
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.from_args(args)
    except InvalidParameters as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    writer = ArtifactWriter(config.out_dir)
    try:
        if args.command == "verify":
            return cmd_verify(config, writer, args.report)
        return COMMANDS[args.command](config, writer)
    except InvalidParameters as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ChartBudgetExceeded as e:
        print(f"[{args.command}] {e}", file=sys.stderr)
        if e.partial_run is not None:
            _save_tower(e.partial_run, writer)
        writer.manifest(config, args.command, "partial", {"error": str(e)})
        return EXIT_PARTIAL
    except GrassmannError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
