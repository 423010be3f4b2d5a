"""Command line entry points.

Subcommands:
  synth            emit a synthetic dataset, its ground truth, and test indices
  fit              run posterior inference, write trace + summary + manifest
  eval             score one partition file against another (ARI / NMI)
  enumerate        exact partition posterior for small inputs
  baseline-kmeans  fit and score the k-means baseline

Everything a run depends on lands in its manifest (resolved config,
seed, package version, numerical backend), so reruns from a manifest
are byte-identical.  Exit codes: 0 ok, 1 runtime failure, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import active_backend
from .data import (
    DataSet,
    load_csv,
    read_indices,
    read_partition_csv,
    save_dataset_csv,
    write_indices,
    write_partition_csv,
)
from .kernels import KernelFamily, KernelParams
from .metrics import NMI_VARIANT, adjusted_rand_index, kmeans, \
    normalized_mutual_information, summarize
from .partitions import Partition, canonicalize, constraints_from_labels
from .sampler import HyperPrior, InitMode, PosteriorTrace, SamplerConfig, \
    TraceSample, exact_posterior, run_inference
from .synthetic import Scenario, SyntheticSpec, generate_synthetic


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration of one `fit` run, as recorded in its manifest."""

    data: str
    out: str
    label_column: str
    truth_file: str | None
    truth_column: str | None
    test_indices: str | None
    kernel: dict
    prior: dict | None
    sampler: dict


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.replace(";", ",").split(",") if v != ""]


def _add_kernel_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", choices=["se", "delta"], default="se")
    p.add_argument("--lengthscales", type=_float_list, default=[1.0],
                   metavar="L1[,L2,...]",
                   help="SE lengthscales; one value is broadcast over dimensions")
    p.add_argument("--delta-value", type=float, default=1.0)
    p.add_argument("--temperature", type=float, default=1.0)


def _add_sampler_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sweeps", type=int, default=500)
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=[m.value for m in InitMode],
                   default=InitMode.SINGLETONS.value)
    p.add_argument("--aux-sweeps", type=int, default=20)
    p.add_argument("--exact-aux-threshold", type=int, default=9)
    p.add_argument("--proposal-step", type=float, default=0.2)
    p.add_argument("--rebuild-interval", type=int, default=64)
    p.add_argument("--fix-hyperparameters", action="store_true",
                   help="skip exchange moves; kernel parameters stay at their initial values")
    p.add_argument("--freeze-temperature", action="store_true")
    p.add_argument("--prior-lengthscale-loc", type=float, default=0.0)
    p.add_argument("--prior-lengthscale-scale", type=float, default=1.0)
    p.add_argument("--prior-temperature-loc", type=float, default=0.0)
    p.add_argument("--prior-temperature-scale", type=float, default=1.0)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detclust",
        description="Semi-supervised clustering with determinant-based partition likelihoods",
    )
    parser.add_argument("--version", action="version", version=f"detclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--scenario", choices=[s.value for s in Scenario], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--boundary-count", type=int, default=None,
                   help="overlap scenario: number of unlabeled near-boundary points")
    p.add_argument("--means", default=None, metavar="X,Y;X,Y;...",
                   help="blobs scenario: component means")
    p.add_argument("--counts", default=None, metavar="N1,N2,...")
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--test-counts", default=None, metavar="T1,T2,...")

    p = sub.add_parser("fit", help="run posterior inference on a CSV dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--label-column", default="label")
    p.add_argument("--truth-file", default=None,
                   help="partition CSV to score samples against")
    p.add_argument("--truth-column", default=None,
                   help="column of --data holding ground-truth cluster ids")
    p.add_argument("--test-indices", default=None,
                   help="file of row indices to restrict scoring to")
    _add_kernel_args(p)
    _add_sampler_args(p)

    p = sub.add_parser("eval", help="score a predicted partition against a reference")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--indices", default=None)

    p = sub.add_parser("enumerate", help="exact partition posterior (small N)")
    p.add_argument("--data", required=True)
    p.add_argument("--label-column", default="label")
    p.add_argument("--out", default=None, help="JSON output path (default stdout)")
    _add_kernel_args(p)

    p = sub.add_parser("baseline-kmeans", help="fit and score k-means")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="directory for the assignment CSV")
    p.add_argument("--label-column", default="label")
    p.add_argument("--truth-file", default=None)
    p.add_argument("--truth-column", default=None)
    p.add_argument("--indices", default=None)
    return parser


def _kernel_params(args, dim: int) -> KernelParams:
    if args.kernel == "se":
        ls = list(args.lengthscales)
        if len(ls) == 1 and dim > 1:
            ls = ls * dim
        if len(ls) != dim:
            raise ValueError(f"{len(ls)} lengthscales for {dim}-dimensional data")
        return KernelParams.squared_exponential(ls, temperature=args.temperature)
    return KernelParams.delta(args.delta_value, temperature=args.temperature)


def _kernel_dict(params: KernelParams) -> dict:
    return {
        "family": params.family.value,
        "lengthscales": list(params.lengthscales) if params.lengthscales else None,
        "delta_value": params.delta_value,
        "temperature": params.temperature,
        "scale": params.scale,
    }


def _write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_truth(args, dataset_path: str) -> Partition | None:
    if args.truth_file and args.truth_column:
        raise ValueError("give either --truth-file or --truth-column, not both")
    if args.truth_file:
        return read_partition_csv(args.truth_file)
    if args.truth_column:
        import csv as _csv

        with open(dataset_path, newline="") as fh:
            reader = _csv.reader(fh)
            header = next(reader)
            if args.truth_column not in header:
                raise ValueError(f"column {args.truth_column!r} not in {dataset_path}")
            col = header.index(args.truth_column)
            raw = [int(rec[col]) for rec in reader]
        return canonicalize(raw)
    return None


def _format_float(v: float) -> str:
    return repr(float(v))


def _hyper_string(params: KernelParams) -> str:
    if params.family is KernelFamily.SQUARED_EXPONENTIAL:
        return "|".join(_format_float(v) for v in params.lengthscales)
    return _format_float(params.delta_value)


def _write_trace_csv(path, trace: PosteriorTrace, dataset: DataSet) -> None:
    import csv as _csv

    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["sweep", "assignment", "lengthscales", "temperature", "loglik"])
        for s in trace.samples:
            assignment = dataset.expand_assignment(s.partition.assignment)
            writer.writerow([
                s.sweep,
                "|".join(str(a) for a in assignment),
                _hyper_string(s.params),
                _format_float(s.params.temperature),
                _format_float(s.log_likelihood),
            ])


def _cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scenario = Scenario(args.scenario)
    if scenario is Scenario.OVERLAP_PAIR:
        kw = {}
        if args.boundary_count is not None:
            kw["boundary_count"] = args.boundary_count
        spec = SyntheticSpec.overlap_default(seed=args.seed, **kw)
    elif scenario is Scenario.MULTI_MODAL:
        spec = SyntheticSpec.multimodal_default(seed=args.seed)
    else:
        if not args.means or not args.counts:
            raise ValueError("blobs scenario needs --means and --counts")
        means = [tuple(_float_list(m)) for m in args.means.split(";") if m]
        counts = [int(v) for v in args.counts.split(",")]
        test_counts = ([int(v) for v in args.test_counts.split(",")]
                       if args.test_counts else None)
        spec = SyntheticSpec.blobs(means, counts, spread=args.spread,
                                   test_counts=test_counts, seed=args.seed)
    dataset, truth = generate_synthetic(spec)
    save_dataset_csv(dataset, out / "data.csv")
    write_partition_csv(out / "truth.csv", truth.assignment)
    test_idx = [i for i, u in enumerate(dataset.source_rows)
                if dataset.labels[u] is None]
    write_indices(out / "test_indices.txt", test_idx)
    manifest = {
        "command": "synth",
        "version": __version__,
        "scenario": spec.scenario.value,
        "seed": spec.seed,
        "means": [list(m) for m in spec.means],
        "covariances": [[list(r) for r in c] for c in spec.covariances],
        "counts": list(spec.counts),
        "truth_components": list(spec.truth_components),
        "test_counts": list(spec.test_counts),
        "boundary_count": spec.boundary_count,
        "n_points": dataset.n_original,
        "n_test": len(test_idx),
        "files": {"data": "data.csv", "truth": "truth.csv",
                  "test_indices": "test_indices.txt"},
    }
    _write_json(manifest, out / "manifest.json")
    print(f"wrote {dataset.n_original} points ({len(test_idx)} test) to {out}")
    return 0


def _cmd_fit(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ignore = (args.truth_column,) if args.truth_column else ()
    dataset = load_csv(args.data, label_column=args.label_column, ignore_columns=ignore)
    params0 = _kernel_params(args, dataset.dim)
    prior = None
    if not args.fix_hyperparameters:
        prior = HyperPrior(
            lengthscale_loc=args.prior_lengthscale_loc,
            lengthscale_scale=args.prior_lengthscale_scale,
            temperature_loc=args.prior_temperature_loc,
            temperature_scale=args.prior_temperature_scale,
        )
    config = SamplerConfig(
        n_sweeps=args.sweeps,
        burn_in=args.burn_in,
        thin=args.thin,
        seed=args.seed,
        aux_sweeps=args.aux_sweeps,
        exact_aux_threshold=args.exact_aux_threshold,
        proposal_step=args.proposal_step,
        rebuild_interval=args.rebuild_interval,
        init_mode=InitMode(args.init),
        freeze_temperature=args.freeze_temperature,
    )
    truth = _load_truth(args, args.data)
    if truth is not None and len(truth) != dataset.n_original:
        raise ValueError(
            f"truth has {len(truth)} rows but the dataset has {dataset.n_original}")
    test_idx = read_indices(args.test_indices) if args.test_indices else None

    trace = run_inference(dataset, params0, prior, config)
    expanded = PosteriorTrace(
        samples=[TraceSample(s.sweep, dataset.expand_partition(s.partition),
                             s.params, s.log_likelihood)
                 for s in trace.samples],
        hyper_accept_count=trace.hyper_accept_count,
        hyper_propose_count=trace.hyper_propose_count,
        degeneracy_count=trace.degeneracy_count,
    )
    _write_trace_csv(out / "trace.csv", expanded, dataset)

    summary: dict = {
        "n_samples": len(trace.samples),
        "hyper_proposed": trace.hyper_propose_count,
        "hyper_accepted": trace.hyper_accept_count,
        "hyper_acceptance_rate": trace.acceptance_rate,
        "degeneracy_count": trace.degeneracy_count,
        "backend": active_backend(),
        "nmi_variant": NMI_VARIANT,
        "mean_ari": None,
        "mean_nmi": None,
    }
    files = {"trace": "trace.csv", "summary": "summary.json"}
    if expanded.samples:
        digest = summarize(expanded, truth, test_idx)
        summary["cluster_count_histogram"] = {
            str(k): v for k, v in digest.cluster_count_histogram.items()}
        summary["mean_num_clusters"] = float(np.mean(
            [s.partition.num_clusters for s in expanded.samples]))
        summary["mean_log_likelihood"] = float(np.mean(
            [s.log_likelihood for s in expanded.samples]))
        summary["mean_ari"] = digest.mean_ari
        summary["mean_nmi"] = digest.mean_nmi
        np.savetxt(out / "co_occurrence.csv", digest.co_occurrence, delimiter=",")
        files["co_occurrence"] = "co_occurrence.csv"
    _write_json(summary, out / "summary.json")

    config_record = RunConfig(
        data=str(args.data),
        out=str(out),
        label_column=args.label_column,
        truth_file=args.truth_file,
        truth_column=args.truth_column,
        test_indices=args.test_indices,
        kernel=_kernel_dict(params0),
        prior=None if prior is None else {
            "family": "log-normal",
            "lengthscale_loc": prior.lengthscale_loc,
            "lengthscale_scale": prior.lengthscale_scale,
            "temperature_loc": prior.temperature_loc,
            "temperature_scale": prior.temperature_scale,
        },
        sampler={
            "n_sweeps": config.n_sweeps,
            "burn_in": config.burn_in,
            "thin": config.thin,
            "seed": config.seed,
            "aux_sweeps": config.aux_sweeps,
            "exact_aux_threshold": config.exact_aux_threshold,
            "proposal_step": config.proposal_step,
            "rebuild_interval": config.rebuild_interval,
            "init_mode": config.init_mode.value,
            "freeze_temperature": config.freeze_temperature,
        },
    )
    manifest = {
        "command": "fit",
        "version": __version__,
        "backend": active_backend(),
        "nmi_variant": NMI_VARIANT,
        "n_points": dataset.n_original,
        "n_unique": dataset.n,
        "dim": dataset.dim,
        "n_labeled": len(dataset.labeled_indices),
        "config": asdict(config_record),
        "files": files,
    }
    _write_json(manifest, out / "manifest.json")
    print(f"{len(trace.samples)} samples -> {out} "
          f"(acceptance {trace.acceptance_rate:.3f}, backend {active_backend()})")
    return 0


def _cmd_eval(args) -> int:
    pred = read_partition_csv(args.pred)
    truth = read_partition_csv(args.truth)
    indices = read_indices(args.indices) if args.indices else None
    result = {
        "ari": adjusted_rand_index(pred, truth, indices),
        "nmi": normalized_mutual_information(pred, truth, indices),
        "nmi_variant": NMI_VARIANT,
        "n": len(pred),
        "n_scored": len(indices) if indices is not None else len(pred),
    }
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def _cmd_enumerate(args) -> int:
    dataset = load_csv(args.data, label_column=args.label_column)
    params = _kernel_params(args, dataset.dim)
    constraints = constraints_from_labels(dataset.labels)
    dist = exact_posterior(dataset.points, params, constraints)
    entries = [
        {"assignment": "|".join(str(a) for a in dataset.expand_assignment(p.assignment)),
         "num_clusters": p.num_clusters,
         "probability": float(prob)}
        for p, prob in dist.items()
    ]
    entries.sort(key=lambda e: (-e["probability"], e["assignment"]))
    payload = {
        "kernel": _kernel_dict(params),
        "n_points": dataset.n_original,
        "n_partitions": len(entries),
        "partitions": entries,
    }
    if args.out:
        _write_json(payload, args.out)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_baseline_kmeans(args) -> int:
    ignore = (args.truth_column,) if args.truth_column else ()
    dataset = load_csv(args.data, label_column=args.label_column, ignore_columns=ignore)
    part = kmeans(dataset.points, args.k, seed=args.seed)
    expanded = dataset.expand_partition(part)
    truth = _load_truth(args, args.data)
    indices = read_indices(args.indices) if args.indices else None
    result: dict = {"k": args.k, "seed": args.seed, "n": dataset.n_original}
    if truth is not None:
        result["ari"] = adjusted_rand_index(expanded, truth, indices)
        result["nmi"] = normalized_mutual_information(expanded, truth, indices)
        result["nmi_variant"] = NMI_VARIANT
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_partition_csv(out / "kmeans_assignment.csv", expanded.assignment)
        _write_json(result, out / "kmeans_summary.json")
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "fit": _cmd_fit,
    "eval": _cmd_eval,
    "enumerate": _cmd_enumerate,
    "baseline-kmeans": _cmd_baseline_kmeans,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
