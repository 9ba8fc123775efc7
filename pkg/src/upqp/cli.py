"""Command-line front end.

Subcommands
-----------
bounds       evaluate every memory-bound formula over d and ε ranges
net          build and certify a greedy ε-net on U(d)
error        certified best-program errors of a net/processor over Haar targets
distortion   sampled embedding distortion of a processor
typewitness  Rademacher type chain and memory lower-bound witness
synth        synthesize a processor from a contraction matrix
run          run a canned experiment by name

Ranges use colon syntax: ``--d 2:6`` (inclusive), ``--eps 0.1:0.9:0.1``.
``UPQP_MAX_DIM`` caps matrix sizes (default 256).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import banach, bounds, experiments, linalg, processors, quantum


def parse_int_range(spec: str) -> list[int]:
    """'2:6' -> [2,3,4,5,6]; '4' -> [4]; '2:8:2' -> [2,4,6,8]."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    start, stop = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) > 2 else 1
    return list(range(start, stop + 1, step))


def parse_float_range(spec: str) -> list[float]:
    """'0.1:0.9:0.1' -> [0.1, ..., 0.9] inclusive within rounding."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    start, stop = float(parts[0]), float(parts[1])
    step = float(parts[2]) if len(parts) > 2 else (stop - start) or 1.0
    if step <= 0:
        raise ValueError("range step must be positive")
    count = int(round((stop - start) / step)) + 1
    values = [round(start + k * step, 12) for k in range(count)]
    return [v for v in values if v <= stop + 1e-12]


def _load_net_or_processor(path: str):
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if "members" in obj:
        return processors.net_from_json(obj)
    return quantum.processor_from_json(obj)


def _cmd_bounds(args) -> int:
    params = {
        "d_values": parse_int_range(args.d),
        "eps_values": parse_float_range(args.eps),
        "K": args.K,
        "C": args.C,
        "C_net": args.C_net,
        "thm3_unitary": args.thm3_unitary,
    }
    out_dir = os.path.dirname(os.path.abspath(args.out)) if args.out else "."
    result = experiments.run_experiment("bounds", params, seed=0, out_dir=out_dir)
    if args.out:
        os.replace(result.csv_path, args.out)
        print(f"wrote {args.out}")
    return 0 if result.passed else 1


def _cmd_net(args) -> int:
    net = processors.build_epsilon_net(
        args.d, args.eps, args.seed,
        max_candidates=args.max_candidates, cert_samples=args.cert_samples,
    )
    processors.save_net(net, args.out)
    print(
        f"net: d={net.d} eps={net.resolution} members={len(net)} "
        f"max_residual={net.certification.max_residual:.6f} certified={net.certified}"
    )
    print(f"wrote {args.out}")
    return 0 if net.certified else 1


def _parse_targets(spec: str) -> int:
    if spec.startswith("haar:"):
        return int(spec.split(":", 1)[1])
    return int(spec)


def _cmd_error(args) -> int:
    source = _load_net_or_processor(args.processor)
    targets = _parse_targets(args.targets)
    rng = np.random.default_rng(args.seed)
    rows = []
    if isinstance(source, processors.UnitaryNet):
        d, resolution = source.d, source.resolution
        for idx in range(targets):
            u = linalg.haar_unitary(d, rng)
            rep = processors.net_programming_error(source, u)
            rows.append([idx, rep.half_diamond_error, rep.method,
                         rep.half_diamond_error <= resolution])
    else:
        d, resolution = source.d, float("inf")
        for idx in range(targets):
            u = linalg.haar_unitary(d, rng)
            rep = processors.certified_best_program_error(source, u, tol=args.tol)
            rows.append([idx, rep.half_diamond_error, rep.method, True])
    experiments.write_csv(args.out, ["target", "half_diamond_error", "method", "within_resolution"], rows)
    worst = max(r[1] for r in rows)
    print(f"targets={targets} max_error={worst:.9g} resolution={resolution}")
    print(f"wrote {args.out}")
    return 0 if all(r[3] for r in rows) else 1


def _cmd_distortion(args) -> int:
    source = _load_net_or_processor(args.processor)
    proc = (
        processors.build_controlled_processor(source)
        if isinstance(source, processors.UnitaryNet)
        else source
    )
    report = banach.distortion(
        proc, samples=args.samples, seed=args.seed,
        epsilon_used=args.eps_cert if args.eps_cert is not None else float("nan"),
        processor_id=args.processor,
    )
    print(
        f"min_ratio={report.sampled_min_ratio:.9g} max_ratio={report.sampled_max_ratio:.9g} "
        f"samples={report.samples}"
    )
    if args.out:
        experiments.write_csv(
            args.out,
            ["processor", "samples", "min_ratio", "max_ratio", "epsilon_used"],
            [[args.processor, report.samples, report.sampled_min_ratio,
              report.sampled_max_ratio, report.epsilon_used]],
        )
        print(f"wrote {args.out}")
    if args.eps_cert is not None:
        floor = float(np.sqrt(1.0 - args.eps_cert))
        return 0 if report.sampled_min_ratio >= floor - 1e-6 else 1
    return 0


def _read_eps_cert(path: str) -> float:
    """Worst certified error from an errors CSV (column half_diamond_error)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        col = header.index("half_diamond_error")
        values = [float(line.strip().split(",")[col]) for line in fh if line.strip()]
    if not values:
        raise ValueError(f"no error rows in {path}")
    return max(values)


def _cmd_typewitness(args) -> int:
    source = _load_net_or_processor(args.processor)
    proc = (
        processors.build_controlled_processor(source)
        if isinstance(source, processors.UnitaryNet)
        else source
    )
    eps = args.eps if args.eps is not None else (_read_eps_cert(args.eps_cert) if args.eps_cert else 0.0)
    witness = banach.memory_lower_bound_witness(proc, eps)
    chain = witness.chain
    print(
        f"sqrt_d={chain.sqrt_d:.9g} image_ratio={chain.image_ratio:.9g} "
        f"transported={chain.transported_lower:.9g} op_bound={chain.operator_norm_bound:.9g}"
    )
    print(
        f"certified_m_lower={witness.certified_m_lower:.9g} "
        f"(log2={witness.log2_m_lower:.9g}) vacuous={witness.vacuous} "
        f"chain_holds={chain.chain_holds}"
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "epsilon": eps,
                    "certified_m_lower": witness.certified_m_lower,
                    "log2_m_lower": witness.log2_m_lower,
                    "vacuous": witness.vacuous,
                    "unitary": witness.unitary,
                    "chain": {
                        "sqrt_d": chain.sqrt_d,
                        "image_ratio": chain.image_ratio,
                        "transported_lower": chain.transported_lower,
                        "operator_norm_bound": chain.operator_norm_bound,
                        "chain_holds": chain.chain_holds,
                        "m_effective": chain.m_effective,
                    },
                },
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0 if chain.chain_holds else 1


def _cmd_synth(args) -> int:
    t = linalg.load_matrix(args.map)
    result = processors.synthesize_processor(t, args.d, args.m, delta=args.delta, seed=args.seed)
    quantum.save_processor(result.processor, args.out)
    print(
        f"synthesized: memory={result.processor.m} (bound d*m^3={args.d * args.m ** 3}) "
        f"delta={result.achieved_delta:.9g} predicted_epsilon={result.predicted_epsilon:.9g}"
    )
    print(f"wrote {args.out}")
    return 0


def _cmd_run(args) -> int:
    params = dict(kv.split("=", 1) for kv in args.param)
    # best-effort numeric coercion for CLI-provided parameters
    parsed: dict = {}
    for key, raw in params.items():
        try:
            parsed[key] = json.loads(raw)
        except json.JSONDecodeError:
            parsed[key] = raw
    result = experiments.run_experiment(args.name, parsed, seed=args.seed, out_dir=args.out_dir)
    print(json.dumps(result.summary, indent=2, sort_keys=True, default=experiments._json_default))
    print(f"passed={result.passed} artifacts: {result.json_path}, {result.csv_path}")
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="upqp", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="evaluate memory-bound formulas")
    p.add_argument("--d", required=True, help="dimension range, e.g. 2:6")
    p.add_argument("--eps", required=True, help="accuracy range, e.g. 0.1:0.9:0.1")
    p.add_argument("--K", type=float, default=bounds.DEFAULT_K, help="universal constant (non-paper default 1)")
    p.add_argument("--C", type=float, default=banach.DEFAULT_TYPE_CONSTANT, help="type constant (default 4)")
    p.add_argument("--C-net", dest="C_net", type=float, default=bounds.DEFAULT_NET_CONSTANT,
                   help="net covering constant (non-paper default 9)")
    p.add_argument("--thm3-unitary", action="store_true", help="use the unitary-channel variant")
    p.add_argument("--out", default="bounds.csv")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("net", help="build and certify an epsilon-net")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-candidates", type=int, default=20000)
    p.add_argument("--cert-samples", type=int, default=10000)
    p.add_argument("--out", default="net.json")
    p.set_defaults(func=_cmd_net)

    p = sub.add_parser("error", help="best-program errors over Haar targets")
    p.add_argument("--processor", required=True, help="net or processor JSON file")
    p.add_argument("--targets", default="haar:200", help="e.g. haar:200")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--out", default="errors.csv")
    p.set_defaults(func=_cmd_error)

    p = sub.add_parser("distortion", help="sampled embedding distortion")
    p.add_argument("--processor", required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps-cert", type=float, default=None,
                   help="certified accuracy for the (1-eps)^{1/2} floor check")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_distortion)

    p = sub.add_parser("typewitness", help="type chain and memory lower bound")
    p.add_argument("--processor", required=True)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--eps-cert", default=None, help="errors CSV; worst error becomes eps")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_typewitness)

    p = sub.add_parser("synth", help="synthesize a processor from a contraction")
    p.add_argument("--map", required=True, help="matrix JSON file for T on d*m")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="proc.json")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("run", help="run a canned experiment")
    p.add_argument("name", choices=experiments.EXPERIMENT_NAMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
