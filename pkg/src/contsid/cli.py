"""Command-line entry point.

Three sub-commands: ``compute`` evaluates SHD/SID/contSID on user files,
``simulate`` generates synthetic (graph, model, dataset) triples for external
discovery tools, and ``bench`` runs self-contained verification suites.

Exit codes: 0 success, 2 validation failure (bad files, mismatched sizes,
degenerate data), 3 numeric failure or a failed bench assertion, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FactorizationError, ParseError, SizeMismatchError
from .io import (
    read_dataset,
    read_graph,
    sha256_file,
    write_dataset,
    write_edge_list,
    write_scm_json,
)
from .kernels import KernelConfig
from .metric import MetricConfig, MetricReport, cont_sid
from .oracle import (
    GaussianLaw,
    empirical_mmd_with_error,
    gaussian_rbf_mmd,
    interventional_gaussian,
)
from .synth import (
    NoiseSpec,
    erdos_renyi_dag,
    intro_example,
    random_linear_scm,
    sample_interventional,
    sample_observational,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _parse_bandwidth(raw: str) -> dict:
    if raw == "median":
        return {"bandwidth_rule": "median_heuristic"}
    if raw.startswith("fixed:"):
        return {"bandwidth_rule": "fixed", "fixed_bandwidth": float(raw.split(":", 1)[1])}
    raise ParseError(f"--bandwidth must be 'median' or 'fixed:<gamma>', got {raw!r}")


def _parse_interventions(raw: str):
    if raw == "observed":
        return None
    if raw.startswith("file:"):
        path = raw.split(":", 1)[1]
        try:
            payload = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path=path,
                             line=exc.lineno, column=exc.colno) from None
        if not isinstance(payload, dict):
            raise ParseError("interventions file must map node index to a value list",
                             path=path)
        return {int(node): [float(v) for v in values] for node, values in payload.items()}
    raise ParseError(f"--interventions must be 'observed' or 'file:<path>', got {raw!r}")


def _parse_noise(raw: str) -> NoiseSpec:
    name, _, param = raw.partition(":")
    value = float(param) if param else 1.0
    if name in ("gauss", "gaussian"):
        return NoiseSpec(family="gaussian", std=value)
    if name == "exp":
        return NoiseSpec(family="exponential", scale=value)
    if name in ("shifted-exp", "shifted_exponential"):
        return NoiseSpec(family="shifted_exponential", scale=value)
    raise ParseError(f"unknown noise spec {raw!r} (use gauss:<std>, exp:<scale>, "
                     f"shifted-exp:<scale>)")


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _manifest(command: str, inputs: dict, seeds, kernel_config: dict,
              data_file_sha256: str | None) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "seeds": seeds,
        "kernel_config": kernel_config,
        "tool_version": __version__,
        "data_file_sha256": data_file_sha256,
        "timestamp": _timestamp(),
    }


def validate_report_payload(payload: dict) -> None:
    import jsonschema

    schema = json.loads(
        resources.files("contsid").joinpath("report_schema.json").read_text())
    jsonschema.validate(payload, schema)


def _print_report(report: MetricReport) -> None:
    print(f"SHD      {report.shd}")
    print(f"SID      {report.sid}")
    print(f"contSID  {report.cont_sid:.6g}")
    print()
    print(f"{'i':>3} {'j':>3}  {'case':<34} distance")
    for res in report.pair_results:
        print(f"{res.i:>3} {res.j:>3}  {res.case.value:<34} {res.distance:.6g}")


def cmd_compute(args) -> int:
    g_true = read_graph(args.true_graph)
    g_learnt = read_graph(args.learnt_graph)
    data = read_dataset(args.data)
    kernel = KernelConfig(regularization=args.regularization,
                          **_parse_bandwidth(args.bandwidth))
    cfg = MetricConfig(kernel=kernel,
                       intervention_values=_parse_interventions(args.interventions),
                       normalize=not args.no_normalize)
    try:
        report = cont_sid(g_true, g_learnt, data, cfg, threads=args.threads)
    except SizeMismatchError as exc:
        raise SizeMismatchError(
            f"{exc} (true={args.true_graph}, learnt={args.learnt_graph}, "
            f"data={args.data})") from None
    _print_report(report)
    if args.json:
        payload = {
            "schema": "contsid-report/v1",
            "report": report.to_dict(),
            "manifest": _manifest(
                "compute",
                {"true_graph": str(args.true_graph),
                 "learnt_graph": str(args.learnt_graph),
                 "data": str(args.data)},
                None,
                report.config,
                sha256_file(args.data),
            ),
        }
        validate_report_payload(payload)
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
        print(f"\nreport written to {args.json}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.p < 2:
        raise SizeMismatchError(f"--p must be at least 2, got {args.p}")
    if args.n < 2:
        raise SizeMismatchError(f"--n must be at least 2, got {args.n}")
    noise = _parse_noise(args.noise)
    dag = erdos_renyi_dag(args.p, args.edge_prob, args.seed)
    scm = random_linear_scm(dag, args.coeff_low, args.coeff_high, noise, args.seed + 1)
    data = sample_observational(scm, args.n, args.seed + 2)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(dag, out / "true.edges")
    write_scm_json(scm, out / "scm.json")
    write_dataset(data, out / "data.csv")
    manifest = _manifest(
        "simulate",
        {"p": args.p, "edge_prob": args.edge_prob, "n": args.n,
         "noise": args.noise, "coeff_low": args.coeff_low,
         "coeff_high": args.coeff_high, "out_dir": str(out)},
        {"seed": args.seed, "scm_seed": args.seed + 1, "data_seed": args.seed + 2},
        {},
        sha256_file(out / "data.csv"),
    )
    manifest["outputs"] = {
        "true_edges_sha256": sha256_file(out / "true.edges"),
        "scm_json_sha256": sha256_file(out / "scm.json"),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote true.edges, scm.json, data.csv, manifest.json to {out}")
    return EXIT_OK


def _bench_table1(args) -> int:
    g1, g2, g3, scm = intro_example()
    cfg = MetricConfig(kernel=KernelConfig(regularization=args.regularization))
    wins = 0
    vals2, vals3 = [], []
    for seed in range(args.seeds):
        data = sample_observational(scm, args.n, seed)
        v2 = cont_sid(g1, g2, data, cfg).cont_sid
        v3 = cont_sid(g1, g3, data, cfg).cont_sid
        wins += v2 < v3
        vals2.append(v2)
        vals3.append(v3)
    rate = wins / args.seeds
    q = [0.1, 0.5, 0.9]
    q2 = np.quantile(vals2, q)
    q3 = np.quantile(vals3, q)
    print(f"seeds {args.seeds}, n {args.n}, lambda {args.regularization}")
    print(f"ordering win-rate (missing weak edge scores lower): {rate:.3f}")
    print(f"contSID(true, missing-weak-edge)   q10/q50/q90: "
          f"{q2[0]:.4f} {q2[1]:.4f} {q2[2]:.4f}")
    print(f"contSID(true, missing-strong-edge) q10/q50/q90: "
          f"{q3[0]:.4f} {q3[1]:.4f} {q3[2]:.4f}")
    if rate < 0.95:
        print("FAIL: win-rate below 0.95")
        return EXIT_NUMERIC
    print("PASS")
    return EXIT_OK


def _bench_oracle(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = []

    # tolerance per pair: 2% relative, widened to five Monte-Carlo standard
    # errors when the requested sample size cannot resolve 2%
    worst = 0.0
    used = 0
    while used < args.pairs:
        p = GaussianLaw(float(rng.uniform(-3, 3)), float(rng.uniform(0.5, 4)))
        q = GaussianLaw(float(rng.uniform(-3, 3)), float(rng.uniform(0.5, 4)))
        bandwidth = float(rng.uniform(0.5, 3))
        exact = gaussian_rbf_mmd(p, q, bandwidth)
        if exact < 0.05:
            continue  # relative error needs a sensible floor
        xs = rng.normal(p.mean, np.sqrt(p.variance), args.samples)
        ys = rng.normal(q.mean, np.sqrt(q.variance), args.samples)
        est, se = empirical_mmd_with_error(xs, ys, bandwidth)
        worst = max(worst, abs(est - exact) / max(0.02 * exact, 5.0 * se))
        used += 1
    print(f"closed-form vs empirical kernel distance: worst error at "
          f"{worst:.2f}x tolerance over {args.pairs} pairs at {args.samples} samples")
    if worst > 1.0:
        failures.append("closed-form disagreement beyond tolerance")

    worst_z = 0.0
    for seed in range(20):
        dag = erdos_renyi_dag(int(rng.integers(2, 7)), 0.4, seed)
        scm = random_linear_scm(dag, -2.0, 2.0, NoiseSpec(), seed + 1)
        i = int(rng.integers(dag.num_nodes))
        j = int(rng.integers(dag.num_nodes))
        if i == j:
            continue
        x_hat = float(rng.uniform(-2, 2))
        law = interventional_gaussian(scm, i, x_hat, j)
        draw = sample_interventional(scm, i, x_hat, 10_000, seed + 2)[:, j]
        z_mean = abs(draw.mean() - law.mean) / max(np.sqrt(law.variance / draw.size), 1e-12)
        worst_z = max(worst_z, z_mean)
    print(f"interventional moments vs sampler: worst mean z-score {worst_z:.2f}")
    if worst_z > 4.0:
        failures.append("interventional moments disagree beyond 4 sigma")

    if failures:
        for f in failures:
            print(f"FAIL: {f}")
        return EXIT_NUMERIC
    print("PASS")
    return EXIT_OK


def _bench_scaling(args) -> int:
    from .embeddings import fit_regression_weights

    rng = np.random.default_rng(0)
    print("weight-fitting stage (Cholesky solve):")
    sizes = [512, 1024, 2048]
    times = []
    for n in sizes:
        x = rng.normal(size=n)
        diff = x[:, None] - x[None, :]
        gram = np.exp(-(diff * diff) / 2.0)
        best = min(
            _timed(lambda: fit_regression_weights(gram, 1e-2)) for _ in range(3)
        )
        times.append(best)
        print(f"  N={n:<5d} {best * 1e3:9.2f} ms")
    exponent = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    print(f"fitted N-exponent: {exponent:.2f} (dense factorization is cubic)")

    print("contSID wall time:")
    for p in sorted({3, args.p}):
        for n in (args.n, 2 * args.n):
            dag = erdos_renyi_dag(p, 0.25, 1)
            scm = random_linear_scm(dag, -2.0, 2.0, NoiseSpec(), 2)
            data = sample_observational(scm, n, 3)
            learnt = erdos_renyi_dag(p, 0.25, 4)
            elapsed = _timed(lambda: cont_sid(dag, learnt, data))
            print(f"  p={p:<3d} N={n:<6d} {elapsed * 1e3:9.2f} ms")
    if exponent < 1.5:
        print("FAIL: weight-fitting exponent implausibly low")
        return EXIT_NUMERIC
    print("PASS")
    return EXIT_OK


def _timed(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def cmd_bench(args) -> int:
    if args.suite == "table1":
        return _bench_table1(args)
    if args.suite == "oracle":
        return _bench_oracle(args)
    return _bench_scaling(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contsid",
        description="Quantify the discrepancy between a true and a learnt "
                    "causal DAG over shared observational data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="Compute SHD, SID and contSID from files.")
    compute.add_argument("true_graph", metavar="TRUE", help=".edges or .csv graph file")
    compute.add_argument("learnt_graph", metavar="LEARNT", help=".edges or .csv graph file")
    compute.add_argument("data", metavar="DATA", help="dataset CSV (N rows x D columns)")
    compute.add_argument("--lambda", dest="regularization", type=float, default=1e-2,
                         help="ridge regularization (default 0.01)")
    compute.add_argument("--bandwidth", default="median", metavar="median|fixed:<g>",
                         help="bandwidth rule (default median heuristic)")
    compute.add_argument("--interventions", default="observed",
                         metavar="observed|file:<path>",
                         help="intervention values per node (JSON file of "
                              "node -> value list)")
    compute.add_argument("--no-normalize", action="store_true",
                         help="skip the observational-norm division in the "
                              "two-path case")
    compute.add_argument("--json", metavar="PATH", default=None,
                         help="write the schema-validated JSON report here")
    compute.add_argument("--threads", type=int, default=None,
                         help="pair-level worker threads (default: all cores)")

    simulate = sub.add_parser("simulate", help="Generate a synthetic "
                                               "(graph, model, dataset) triple.")
    simulate.add_argument("--p", type=int, required=True, help="number of nodes")
    simulate.add_argument("--edge-prob", type=float, default=0.25)
    simulate.add_argument("--n", type=int, default=100, help="number of samples")
    simulate.add_argument("--noise", default="exp:1",
                          metavar="gauss:<std>|exp:<scale>|shifted-exp:<scale>")
    simulate.add_argument("--coeff-low", type=float, default=-10.0)
    simulate.add_argument("--coeff-high", type=float, default=10.0)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out-dir", required=True)

    bench = sub.add_parser("bench", help="Run a verification or benchmark suite.")
    bench.add_argument("suite", choices=["table1", "oracle", "scaling"])
    bench.add_argument("--seeds", type=int, default=100)
    bench.add_argument("--n", type=int, default=100)
    bench.add_argument("--p", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--pairs", type=int, default=20)
    bench.add_argument("--samples", type=int, default=20_000)
    bench.add_argument("--lambda", dest="regularization", type=float, default=1e-2)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"compute": cmd_compute, "simulate": cmd_simulate, "bench": cmd_bench}
    try:
        return handlers[args.command](args)
    except FactorizationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, IndexError) as exc:
        # Covers every validation error the library raises (parse, size,
        # cycle, degenerate data, domain, overlap, ...).
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
