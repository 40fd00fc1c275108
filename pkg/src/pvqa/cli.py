"""Command-line entry point: ``pvqa <command> [options]``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from . import config as config_mod
from . import harness
from .errors import ConfigError, DegenerateCostError, ProblemError, SingularSystemError
from .operators import BoundaryCondition, PoissonProblem, laplacian_pauli, make_source, shift_pauli

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
DEFAULT_OUT = "pvqa-out"


def _int_list(text: str) -> list[int]:
    """``"4-8"`` or ``"2,4,6"``."""
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",") if t]


def _str_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run-config TOML file")
    common.add_argument("--out", type=Path, help="output root directory")
    common.add_argument("--seed", type=int, help="override execution.seed")

    p = argparse.ArgumentParser(prog="pvqa", description="Variational Poisson solver and ablations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("solve", parents=[common], help="optimize one configuration")

    d = sub.add_parser("ablate-depth", parents=[common], help="transpiled depth per circuit variant")
    d.add_argument("--qubits", type=_int_list, default=_int_list("2-8"))
    d.add_argument("--variants", type=_str_list, default=list(harness.DEPTH_VARIANTS))
    d.add_argument("--coupling", choices=("linear", "none"), default="linear")

    f = sub.add_parser("ablate-fidelity", parents=[common], help="noisy fidelity per ansatz family")
    f.add_argument("--qubits", type=int, default=4)
    f.add_argument("--families", type=_str_list, default=list(harness.TN_FAMILIES))
    f.add_argument("--noise", default="osaka-like")
    f.add_argument("--layers", type=int, default=1)

    pl = sub.add_parser("plateau", parents=[common], help="gradient-variance sweep")
    pl.add_argument("--families", type=_str_list, default=["hea", "mps", "ttnpp"])
    pl.add_argument("--qubits", type=_int_list, default=_int_list("2-6"))
    pl.add_argument("--layers", default="n", help="integer, or 'n' for one layer per qubit")
    pl.add_argument("--samples", type=int, default=50)

    dc = sub.add_parser("decompose", parents=[common], help="print an operator as a Pauli sum")
    dc.add_argument("--what", choices=("shift", "laplacian"), required=True)
    dc.add_argument("--qubits", type=int, required=True)
    dc.add_argument("--bc", choices=[b.value for b in BoundaryCondition], default="periodic")

    dp = sub.add_parser("depth", parents=[common], help="transpiled depth rows on stdout")
    dp.add_argument("--circuit", choices=("shift-add", "pauli-term"), required=True)
    dp.add_argument("--qubits", type=int, required=True)
    dp.add_argument("--coupling", choices=("linear", "none"), default="linear")
    return p


def _load_config(args) -> config_mod.RunConfig | None:
    if args.config is None:
        return None
    cfg = config_mod.load(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(
            cfg, execution=dataclasses.replace(cfg.execution, seed=args.seed)
        )
    return cfg


def output_root(args, cfg: config_mod.RunConfig | None) -> Path:
    """``--out``, then ``output.directory``, then ``$PVQA_OUT``, then ``./pvqa-out``."""
    if args.out is not None:
        return args.out
    if cfg is not None and cfg.output.directory:
        d = Path(cfg.output.directory)
        return d if d.is_absolute() else Path(cfg.base_dir) / d
    return Path(os.environ.get("PVQA_OUT", DEFAULT_OUT))


def _seed(args, cfg) -> int:
    if args.seed is not None:
        return args.seed
    return cfg.execution.seed if cfg is not None else 0


def _run(args) -> int:
    cfg = _load_config(args)
    out = sys.stdout

    if args.command == "solve":
        if cfg is None:
            raise ConfigError("solve needs --config")
        result = harness.run_solve(cfg, output_root(args, cfg))
        rec = result.record
        print(f"run directory: {result.run_dir}", file=out)
        print(f"best cost {rec.best_cost:.6g} (lower bound {rec.cost_lower_bound:.6g}), "
              f"overlap {rec.overlap_vs_oracle:.6f}, evals {rec.evals_used}", file=out)
        return EXIT_OK

    if args.command == "decompose":
        n = args.qubits
        if args.what == "shift":
            ps = shift_pauli(n)
        else:
            bc = BoundaryCondition(args.bc)
            kind = "alternating" if bc is BoundaryCondition.PERIODIC else "ones"
            ps = laplacian_pauli(PoissonProblem(n, bc, make_source(kind, n)))
        out.write(ps.dumps())
        return EXIT_OK

    if args.command == "depth":
        variant = "shift-add-vchain" if args.circuit == "shift-add" else "pauli-term-max"
        row = harness.depth_row(args.qubits, variant, args.coupling)
        out.write(harness.csv_text(harness.DEPTH_COLUMNS, [row]))
        return EXIT_OK

    root = output_root(args, cfg)
    if args.command == "ablate-depth":
        rows = harness.depth_ablation(args.qubits, args.variants, args.coupling)
        path = harness.write_csv(root / "depth.csv", harness.DEPTH_COLUMNS, rows)
    elif args.command == "ablate-fidelity":
        eps = (None, None, None)
        if cfg is not None:
            eps = (cfg.noise.eps_1q, cfg.noise.eps_2q, cfg.noise.eps_3q)
        rows = harness.fidelity_ablation(args.qubits, args.families, args.noise,
                                         args.layers, _seed(args, cfg), eps)
        path = harness.write_csv(root / "fidelity.csv", harness.FIDELITY_COLUMNS, rows)
    else:
        rows = harness.plateau_sweep(args.families, args.qubits, args.layers,
                                     args.samples, _seed(args, cfg))
        path = harness.write_csv(root / "plateau.csv", harness.PLATEAU_COLUMNS, rows)
    print(f"wrote {path}", file=out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConfigError, ProblemError) as exc:
        if isinstance(exc, SingularSystemError):
            print(f"pvqa: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"pvqa: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateCostError, ArithmeticError) as exc:
        print(f"pvqa: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"pvqa: io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"pvqa: invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
