"""Command line entry point: ``cutrecon <subcommand>``.

Exit codes: 0 ok, 1 usage error, 2 bad input data, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .circuit import parse_circuit, partition_circuit
from .harness import ExperimentSpec, parse_widths, run_sweep, summarize, write_rows
from .metrics import avg_variational_distance
from .reconstruct_exact import reconstruct_exact, reconstruct_from_queries
from .reconstruct_mcmc import MhConfig, mh_reconstruct
from .serialization import load_tensor, partition_to_dict, read_distribution, save_tensor, write_distribution
from .simulator import build_tensors

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_circuit(path):
    return parse_circuit(Path(path).read_text())


def _emit(doc, out):
    text = json.dumps(doc, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_parse(args):
    c = _read_circuit(args.circuit)
    _emit({"width": c.width, "gates": len(c.gates), "cuts": [[m.wire, m.after_gate] for m in c.cuts]}, None)


def cmd_cut(args):
    partition = partition_circuit(_read_circuit(args.circuit))
    _emit(partition_to_dict(partition), args.output)


def cmd_simulate(args):
    partition = partition_circuit(_read_circuit(args.circuit))
    tensors = build_tensors(partition, shots=args.shots, seed=args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    suffix = ".json" if args.format == "json" else ".bin"
    paths = []
    for sub, t in zip(partition.subcircuits, tensors):
        path = out / f"tensor_{sub.index}{suffix}"
        save_tensor(t, path)
        paths.append(str(path))
    print("\n".join(paths))


def cmd_reconstruct(args):
    tensors = [load_tensor(p) for p in args.tensors]
    if args.method == "exact":
        q = reconstruct_from_queries(tensors) if len(tensors) <= 2 else reconstruct_exact(tensors)
        diagnostics = {"negativity": q.report}
        if args.normalize:
            q = q.normalize()
    else:
        cfg = MhConfig(args.samples, args.burn_in, args.chains, args.seed, init=args.init)
        q = mh_reconstruct(tensors, cfg, randomized=args.method == "mcmc-rand")
        diagnostics = q.diagnostics
    write_distribution(q, args.output)
    Path(str(args.output) + ".diagnostics.json").write_text(json.dumps(diagnostics, indent=1) + "\n")


def cmd_compare(args):
    p, q = read_distribution(args.p), read_distribution(args.q)
    if p.width != q.width:
        raise ValueError(f"widths differ: {p.width} vs {q.width}")
    _emit(avg_variational_distance(p, q, tol=args.tol).as_dict(), None)


def cmd_sweep(args):
    methods = tuple(args.methods.split(",")) if args.methods else None
    spec = ExperimentSpec(
        cuts=args.cuts, subcircuit_width=min(parse_widths(args.widths)), depth=args.depth,
        trials=args.trials, samples=args.samples, burn_in=args.burn_in, chains=args.chains,
        shots=args.shots, seed=args.seed, methods=methods,
    )
    rows = run_sweep(spec, parse_widths(args.widths))
    write_rows(rows, args.output)
    summary_path = args.summary or str(Path(args.output).with_suffix("")) + ".summary.csv"
    write_rows(summarize(rows), summary_path)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cutrecon", description="Cut small circuits and reconstruct their output distribution.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", help="validate a circuit file")
    p.add_argument("circuit")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("cut", help="emit the subcircuit partition as JSON")
    p.add_argument("circuit")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("simulate", help="emit one tensor file per subcircuit")
    p.add_argument("circuit")
    p.add_argument("-o", "--out-dir", required=True)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "bin"], default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="rebuild the output distribution from tensor files")
    p.add_argument("tensors", nargs="+")
    p.add_argument("--method", choices=["exact", "mcmc", "mcmc-rand"], default="exact")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--burn-in", type=float, default=0.2)
    p.add_argument("--chains", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=["uniform", "prescan"], default="uniform")
    p.add_argument("--normalize", action="store_true", help="clamp negatives and rescale exact output")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("compare", help="distances between two distribution files")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="random cut experiments over subcircuit widths")
    p.add_argument("--cuts", type=int, choices=[1, 2], default=1)
    p.add_argument("--widths", default="2-5")
    p.add_argument("--depth", type=int)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--samples", type=int, help="default: 4096 per subcircuit qubit")
    p.add_argument("--burn-in", type=float, default=0.2)
    p.add_argument("--chains", type=int, default=4)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", help="comma list of exact,mcmc_full,mcmc_randomized")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--summary")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except FloatingPointError as exc:
        print(f"cutrecon: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError) as exc:
        print(f"cutrecon: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
