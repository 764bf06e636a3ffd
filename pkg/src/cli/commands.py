"""
Command-line commands: evaluate, optimize, simulate, curves, bounds, reproduction and the run archive
"""

import argparse
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..bounds.appendix_bounds import AppendixBounds
from ..config.settings import Config, GAConfig, SAConfig, SimConfig, load_run_config
from ..constellation.builtins import BUILTIN_NAMES, builtin, builtin_structure
from ..constellation.constellation import Constellation
from ..constellation.serializer import ConstellationSerializer
from ..constellation.structures import GeneratorStructure, StructureKind
from ..database.run_db_manager import RunDatabaseManager
from ..diversity.diversity import ChannelConfig, DiversityCalculator
from ..optimize.annealing import SimulatedAnnealingOptimizer
from ..optimize.genetic import GeneticOptimizer
from ..optimize.grid_search import GridSearchOptimizer
from ..optimize.objective import Objective, OptimizerTrace
from ..simulation.channel_sim import ChannelSimulator
from ..utils.exceptions import ConstellationError, NumericError, ValidationError
from ..utils.helpers import seed_utils, snr_utils
from .formatters import OutputFormatter
from .reproduce import DEFAULT_CELL_BUDGET, TABLE_IDS, TableReproducer

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_INTERRUPTED = 130

STRUCTURE_CHOICES = [k.value for k in StructureKind if k != StructureKind.PRODUCT_S1S2]
SINE_PRODUCT_CASES = ((1, 3), (2, 3), (2, 4))


class CliArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        OutputFormatter.status(f"❌ {self.prog}: {message}")
        raise SystemExit(EXIT_USAGE)


# --- shared helpers ---

def _resolve_seed(args) -> int:
    seed, drawn = seed_utils.resolve_seed(args.seed)
    if drawn:
        OutputFormatter.status(f"🎲 seed {seed}")
    return seed


def _load_input(args) -> Tuple[str, Constellation]:
    """Constellation named by --builtin or read from --in"""
    if args.builtin:
        return args.builtin, builtin(args.builtin)
    if args.in_path:
        return args.in_path, ConstellationSerializer.load(args.in_path)
    raise ValidationError("input: give --builtin NAME or --in FILE")


def _snr_grid(args) -> Tuple[float, ...]:
    return snr_utils.parse_db_range(args.snr_db)


def _objective(args, T: int, M: int) -> Objective:
    """Objective from --objective; the diversity-function kinds read --snr-db"""
    if args.objective == "product":
        return Objective.max_product()
    if args.objective == "sum":
        return Objective.max_sum()
    if args.snr_db is None:
        raise ValidationError(f"snr-db: objective {args.objective} needs an SNR")
    grid = _snr_grid(args)
    rhos = [snr_utils.db_to_linear(x) for x in grid]
    channel = ChannelConfig(T=T, M=M, N=args.receive_antennas, rho=rhos[0])
    if args.objective == "exact":
        if len(rhos) != 1:
            raise ValidationError("snr-db: exact objective takes a single SNR")
        return Objective.min_exact_at(channel)
    if len(rhos) == 1:
        return Objective.min_chernoff_at(channel)
    return Objective.min_chernoff_over(channel, rhos)


def _archive(args) -> RunDatabaseManager:
    return RunDatabaseManager(args.db)


def _finish_optimization(args, trace: OptimizerTrace, structure: str):
    """Summary table, notes, trace file, constellation file and archive row"""
    OutputFormatter.emit(OutputFormatter.trace_summary(trace, structure))
    for note in trace.notes:
        OutputFormatter.status(f"🔍 {note}")
    if args.trace:
        OutputFormatter.write_frame(trace.to_frame(), args.trace)
    if args.out:
        ConstellationSerializer.save(trace.final, args.out)
        OutputFormatter.status(f"✅ constellation written to {args.out}")
    if args.record:
        run_id = _archive(args).record_optimization(trace, structure)
        OutputFormatter.status(f"✅ recorded as run {run_id}")


# --- commands ---

def cmd_evaluate(args) -> int:
    """Diversity product, sum and rate of a constellation"""
    name, c = _load_input(args)
    report = DiversityCalculator.report(c)
    OutputFormatter.emit(OutputFormatter.report_frame(name, c, report), args.out)
    return EXIT_OK


def _sa_config(args, seed: int) -> SAConfig:
    overrides = {
        "seed": seed,
        "budget_seconds": args.budget_seconds,
        "metropolis": None if args.metropolis is None else args.metropolis == "on",
    }
    if args.config:
        return load_run_config(args.config, SAConfig, overrides)
    return SAConfig(**{k: v for k, v in overrides.items() if v is not None})


def cmd_optimize_sa(args) -> int:
    """Simulated annealing on a structure, or refinement of an existing design"""
    seed = _resolve_seed(args)
    cfg = _sa_config(args, seed)

    if args.builtin or args.in_path:
        if args.restarts > 1:
            raise ValidationError("restarts: refinement runs a single chain")
        name, c = _load_input(args)
        start = (builtin_structure(args.builtin) if args.builtin else None) or c
        objective = _objective(args, c.T, c.M)
        OutputFormatter.status(f"🔍 refining {name} for {objective.label()}")
        trace = SimulatedAnnealingOptimizer.refine_from(start, objective, cfg)
        label = start.describe() if isinstance(start, GeneratorStructure) else f"free(L={c.L})"
    else:
        template = GeneratorStructure.template(
            StructureKind(args.structure), args.dim, p=args.p, q=args.q, r=args.r,
            T=args.T, size=args.size,
        )
        objective = _objective(args, template.T, template.M)
        OutputFormatter.status(f"🔍 annealing {template.describe()} (L={template.size()}) "
                               f"for {objective.label()}")
        if args.restarts > 1:
            trace = SimulatedAnnealingOptimizer.multi_start(template, objective, cfg,
                                                            args.restarts, args.workers)
        else:
            trace = SimulatedAnnealingOptimizer.run(template, objective, cfg)
        label = template.describe()

    _finish_optimization(args, trace, label)
    return EXIT_OK


def cmd_optimize_ga(args) -> int:
    """Genetic search over free constellations"""
    seed = _resolve_seed(args)
    overrides = {"seed": seed, "budget_seconds": args.budget_seconds, "population_size": args.size}
    if args.config:
        cfg = load_run_config(args.config, GAConfig, overrides)
    else:
        cfg = GAConfig(**{k: v for k, v in overrides.items() if v is not None})
    objective = _objective(args, 2 * args.dim, args.dim)
    OutputFormatter.status(f"🔍 genetic search, L={args.size}, M={args.dim}, {objective.label()}")
    trace = GeneticOptimizer.run(args.dim, args.size, objective, cfg)
    _finish_optimization(args, trace, f"free(L={args.size})")
    return EXIT_OK


def cmd_grid_search(args) -> int:
    """Exhaustive U(2) grid over one or two generators"""
    template = GeneratorStructure.template(StructureKind(args.structure), 2, p=args.p, q=args.q)
    objective = _objective(args, template.T, template.M)
    points = GridSearchOptimizer.cost(template, args.density)
    OutputFormatter.status(f"🔍 grid search {template.describe()}, {points} grid points")
    trace = GridSearchOptimizer.run(template, objective, args.density,
                                    budget_seconds=args.budget_seconds)
    _finish_optimization(args, trace, template.describe())
    return EXIT_OK


def cmd_simulate(args) -> int:
    """Monte-Carlo block error rate over an SNR grid"""
    name, c = _load_input(args)
    seed = _resolve_seed(args)
    overrides = {
        "seed": seed,
        "rho_db": _snr_grid(args),
        "receive_antennas": args.receive_antennas,
        "trials_per_point": args.trials,
        "max_errors": args.max_errors,
    }
    if args.config:
        sim = load_run_config(args.config, SimConfig, overrides)
    else:
        sim = SimConfig(**{k: v for k, v in overrides.items() if v is not None})
    OutputFormatter.status(f"🔍 simulating {name}: {len(sim.rho_db)} SNR points, "
                           f"{sim.trials_per_point} trials each, N={sim.receive_antennas}")
    result = ChannelSimulator.simulate_bler(c, sim, label=name)
    OutputFormatter.emit(result.to_frame(), args.out)
    if args.record:
        rows = _archive(args).record_simulation(result)
        OutputFormatter.status(f"✅ recorded {rows} simulation rows")
    return EXIT_OK


def cmd_curve(args) -> int:
    """Chernoff or exact diversity function over an SNR grid"""
    _, c = _load_input(args)
    configs = ChannelConfig.sweep(c.T, c.M, args.receive_antennas, _snr_grid(args))
    points = DiversityCalculator.diversity_function_curve(c, configs, exact=args.exact)
    OutputFormatter.emit(OutputFormatter.curve_frame(points), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    """F(n) estimates, the three-element search and the sine-product check"""
    seed = _resolve_seed(args)
    rng = np.random.default_rng(seed)

    if args.part in ("F", "all"):
        frames = [AppendixBounds.estimate_F(n, args.steps, rng).to_frame() for n in range(2, args.n + 1)]
        OutputFormatter.status("🔍 F(n) estimates")
        OutputFormatter.emit(pd.concat(frames, ignore_index=True))

    if args.part in ("three-element", "all"):
        report = AppendixBounds.verify_three_element_bounds(args.density, rng, samples=args.trials)
        OutputFormatter.status(f"🔍 three-element sets, {report.samples} random samples")
        OutputFormatter.emit(report.to_frame())
        if report.within_bound():
            OutputFormatter.status("✅ no three-element set exceeds sqrt(3)/2")
        else:
            OutputFormatter.status("❌ a three-element set exceeds sqrt(3)/2")

    if args.part in ("sine-product", "all"):
        rows = []
        for m, n in SINE_PRODUCT_CASES:
            check = AppendixBounds.sine_product_check(m, n, rng)
            rows.append({"m": m, "n": n, "maximum": check.maximum, "expected": check.expected,
                         "max_angle_deviation": check.max_angle_deviation, "confirmed": check.confirmed})
        OutputFormatter.status("🔍 min-product of sines under column sums pi")
        OutputFormatter.emit(pd.DataFrame(rows))
    return EXIT_OK


def cmd_builtin_export(args) -> int:
    """Write a builtin constellation in the constellation file format"""
    c = builtin(args.builtin)
    if args.out:
        ConstellationSerializer.save(c, args.out)
        OutputFormatter.status(f"✅ {args.builtin} written to {args.out}")
    else:
        sys.stdout.write(ConstellationSerializer.serialize(c).decode("utf-8"))
        sys.stdout.write("\n")
    return EXIT_OK


def _parse_cells(text: Optional[str]) -> Optional[List[int]]:
    if not text:
        return None
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as e:
        raise ValidationError(f"cells: expected comma-separated indices, got '{text}'") from e


def cmd_reproduce(args) -> int:
    """Achieved against published values for one table"""
    if args.list:
        cells = TableReproducer.cells(args.table)
        OutputFormatter.emit(pd.DataFrame([
            {"cell": k, "label": c.label, "method": c.method, "objective": c.objective,
             "published": c.published_value}
            for k, c in enumerate(cells)
        ]))
        return EXIT_OK
    seed = _resolve_seed(args)
    budget = args.budget_seconds or DEFAULT_CELL_BUDGET
    cells = _parse_cells(args.cells)
    TableReproducer.cells(args.table)
    OutputFormatter.status(f"🔍 reproducing table {args.table}, {budget:g}s per optimizer cell")
    df = TableReproducer.run_table(args.table, seed, budget, cells)
    OutputFormatter.emit(df, args.out)
    return EXIT_OK


def cmd_runs(args) -> int:
    """List archived optimizer or simulation runs"""
    archive = _archive(args)
    if args.simulations:
        df = archive.get_simulation_runs(args.label)
    elif args.best:
        df = archive.get_best_runs()
    else:
        df = archive.get_optimization_runs(args.method)
    OutputFormatter.emit(df, args.out)
    return EXIT_OK


# --- parser ---

def _parents():
    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group()
    group.add_argument("--builtin", metavar="NAME",
                       help=f"Builtin constellation ({', '.join(BUILTIN_NAMES)})")
    group.add_argument("--in", dest="in_path", metavar="FILE", help="Constellation file")

    seed = argparse.ArgumentParser(add_help=False)
    seed.add_argument("--seed", type=int, default=None, metavar="U64",
                      help="Random seed (drawn and printed when omitted)")

    objective = argparse.ArgumentParser(add_help=False)
    objective.add_argument("--objective", choices=["product", "sum", "chernoff", "exact"], default="product",
                           help="What to optimize (default: product)")
    objective.add_argument("--snr-db", default=None, metavar="LO:HI:STEP",
                           help="SNR for the chernoff/exact objectives; a grid makes chernoff an interval objective")
    objective.add_argument("--receive-antennas", type=int, default=Config.DEFAULT_RECEIVE_ANTENNAS,
                           metavar="N", help="Receive antennas (default: 2)")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", metavar="FILE", help="Output file")

    archive = argparse.ArgumentParser(add_help=False)
    archive.add_argument("--record", action="store_true", help="Record the run in the archive")
    archive.add_argument("--db", metavar="FILE", default=None, help="Archive database path")

    optimizer = argparse.ArgumentParser(add_help=False)
    optimizer.add_argument("--budget-seconds", type=float, default=None, help="Wall-clock budget")
    optimizer.add_argument("--trace", metavar="FILE", help="Write the (iteration, best_value) trace as CSV")
    optimizer.add_argument("--config", metavar="FILE", help="JSON run configuration")

    return source, seed, objective, output, archive, optimizer


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per operation"""
    parser = CliArgumentParser(
        prog="app.py",
        description=f"{Config.APP_NAME} {Config.APP_VERSION}",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python app.py evaluate --builtin sl2f5
  python app.py optimize-sa --structure akbl --p 5 --q 5 --objective sum --seed 1 --budget-seconds 60
  python app.py optimize-ga --dim 2 --size 4 --objective sum --seed 1
  python app.py simulate --builtin numderived121 --snr-db 0:20:4 --trials 20000 --seed 7
  python app.py reproduce 2 --cells 0 --seed 1
        """,
    )
    source, seed, objective, output, archive, optimizer = _parents()
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=CliArgumentParser)
    sub.required = True

    p = sub.add_parser("evaluate", parents=[source, output], help="Diversity product, sum and rate")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("optimize-sa", parents=[source, seed, objective, output, archive, optimizer],
                       help="Simulated annealing")
    p.add_argument("--structure", choices=STRUCTURE_CHOICES, default=StructureKind.POWERS_AB.value)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--q", type=int, default=0)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--dim", type=int, default=2, help="Transmit antennas M (default: 2)")
    p.add_argument("--T", type=int, default=0, help="Block length of the general form")
    p.add_argument("--size", type=int, default=0, help="Size of a free constellation")
    p.add_argument("--metropolis", choices=["on", "off"], default=None)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_optimize_sa)

    p = sub.add_parser("optimize-ga", parents=[seed, objective, output, archive, optimizer],
                       help="Genetic search")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--size", type=int, required=True)
    p.set_defaults(handler=cmd_optimize_ga)

    p = sub.add_parser("grid-search", parents=[objective, output, archive], help="Exhaustive U(2) grid")
    p.add_argument("--budget-seconds", type=float, default=None, help="Wall-clock budget")
    p.add_argument("--trace", metavar="FILE", help="Write the improvement trace as CSV")
    p.add_argument("--structure", choices=[StructureKind.POWERS_A.value, StructureKind.POWERS_AB.value],
                   default=StructureKind.POWERS_AB.value)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--q", type=int, default=0)
    p.add_argument("--density", type=int, default=8, help="Grid points per angle")
    p.set_defaults(handler=cmd_grid_search)

    p = sub.add_parser("simulate", parents=[source, seed, output, archive], help="Block error rate")
    p.add_argument("--snr-db", default="0:20:5", metavar="LO:HI:STEP")
    p.add_argument("--receive-antennas", type=int, default=Config.DEFAULT_RECEIVE_ANTENNAS, metavar="N")
    p.add_argument("--trials", type=int, default=None, help="Trials per SNR point")
    p.add_argument("--max-errors", type=int, default=None, help="Stop a point after this many errors")
    p.add_argument("--config", metavar="FILE", help="JSON simulation configuration")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("curve", parents=[source, output], help="Diversity function over SNR")
    p.add_argument("--snr-db", default="0:30:2", metavar="LO:HI:STEP")
    p.add_argument("--receive-antennas", type=int, default=Config.DEFAULT_RECEIVE_ANTENNAS, metavar="N")
    p.add_argument("--exact", action="store_true", help="Exact integral instead of the Chernoff bound")
    p.set_defaults(handler=cmd_curve)

    p = sub.add_parser("bounds", parents=[seed], help="Three-element optimality checks")
    p.add_argument("--part", choices=["F", "three-element", "sine-product", "all"], default="all")
    p.add_argument("--n", type=int, default=3, help="Largest n for F(n) (2..5)")
    p.add_argument("--steps", type=int, default=2000, help="Annealing steps per F(n) restart")
    p.add_argument("--trials", type=int, default=100_000, help="Random three-element samples")
    p.add_argument("--density", type=int, default=12, help="Angles per axis of the diagonal grid")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("builtin-export", parents=[output], help="Write a builtin as a constellation file")
    p.add_argument("--builtin", required=True, metavar="NAME")
    p.set_defaults(handler=cmd_builtin_export)

    p = sub.add_parser("reproduce", parents=[seed, output], help="Published tables, achieved vs published")
    p.add_argument("table", metavar="TABLE", help=f"Table id ({', '.join(TABLE_IDS)})")
    p.add_argument("--cells", default=None, help="Comma-separated cell indices")
    p.add_argument("--budget-seconds", type=float, default=None, help="Budget per optimizer cell (default: 180)")
    p.add_argument("--list", action="store_true", help="List the cells without running them")
    p.set_defaults(handler=cmd_reproduce)

    p = sub.add_parser("runs", parents=[output], help="Archived runs")
    p.add_argument("--db", metavar="FILE", default=None, help="Archive database path")
    p.add_argument("--method", default=None, help="Only runs of this method")
    p.add_argument("--best", action="store_true", help="Best run per objective and structure")
    p.add_argument("--simulations", action="store_true", help="Simulation rows instead of optimizer runs")
    p.add_argument("--label", default=None, help="Only simulations with this label")
    p.set_defaults(handler=cmd_runs)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one command and map failures to exit codes"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except SystemExit as e:
        return EXIT_OK if e.code is None else int(e.code)
    except ValidationError as e:
        OutputFormatter.status(f"❌ {e}")
        return EXIT_VALIDATION
    except NumericError as e:
        OutputFormatter.status(f"❌ numeric failure: {e}")
        return EXIT_NUMERIC
    except ConstellationError as e:
        OutputFormatter.status(f"❌ {e}")
        return EXIT_VALIDATION
    except KeyboardInterrupt:
        OutputFormatter.status("\n👋 Stopped")
        return EXIT_INTERRUPTED
