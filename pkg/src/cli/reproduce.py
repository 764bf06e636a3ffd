"""
Reproduction of the published comparison tables

Each table is a list of cells. A cell names how its constellation is
obtained (a builtin, annealing on a structure, grid search, or the genetic
search), the metric it is scored on and the published value. Running a
table gives the achieved value next to the published one.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import pandas as pd

from ..config.settings import GAConfig, SAConfig
from ..constellation.builtins import builtin
from ..constellation.structures import GeneratorStructure, StructureKind
from ..diversity.diversity import DiversityCalculator
from ..optimize.annealing import SimulatedAnnealingOptimizer
from ..optimize.genetic import GeneticOptimizer
from ..optimize.grid_search import GridSearchOptimizer
from ..optimize.objective import Objective
from ..utils.exceptions import ValidationError
from ..utils.helpers import Stopwatch, get_logger, seed_utils

logger = get_logger(__name__)

DEFAULT_CELL_BUDGET = 180.0
GRID_DENSITY = 5


@dataclass(frozen=True)
class ReproductionCell:
    """One published table entry and the run that reproduces it"""
    table: str
    label: str
    method: str                 # "builtin" | "sa" | "grid" | "ga"
    objective: str              # "product" | "sum"
    published_value: Optional[float]
    structure: str = ""         # StructureKind value or builtin name
    dim: int = 2
    p: int = 0
    q: int = 0
    r: int = 0
    T: int = 0
    size: int = 0

    def template(self) -> GeneratorStructure:
        return GeneratorStructure.template(
            StructureKind(self.structure), self.dim, p=self.p, q=self.q, r=self.r, T=self.T,
        )


def _objective(name: str) -> Objective:
    return Objective.max_product() if name == "product" else Objective.max_sum()


# Sizes of the by-structure tables and the exponent bounds producing them
_TWO_GENERATOR_SIZES = (36, 49, 64, 256, 400, 900, 10000)
_THREE_GENERATOR_SIZES = (27, 64, 216, 343, 512, 729, 9261)


def _two_generator_bounds(kind: StructureKind, size: int) -> Dict[str, int]:
    side = round(size ** 0.5)
    if kind == StructureKind.POWERS_AB:
        return {"p": side - 1, "q": side - 1}
    return {"p": size - 1}


def _three_generator_bounds(kind: StructureKind, size: int) -> Dict[str, int]:
    side = round(size ** (1.0 / 3.0))
    if kind == StructureKind.POWERS_ABC:
        return {"p": side - 1, "q": side - 1, "r": side - 1}
    return {"p": size - 1}


def _by_structure(table: str, objective: str, rows: Dict[StructureKind, Sequence[Optional[float]]],
                  sizes: Sequence[int], bounds) -> List[ReproductionCell]:
    cells = []
    for kind, values in rows.items():
        for size, value in zip(sizes, values):
            if value is None:
                continue
            cells.append(ReproductionCell(
                table=table, label=f"{kind.value} L={size}", method="sa", objective=objective,
                published_value=value, structure=kind.value, dim=2, **bounds(kind, size),
            ))
    return cells


def _by_dimension(table: str, method: str, objective: str,
                  rows: Dict[int, Sequence[float]]) -> List[ReproductionCell]:
    cells = []
    for size, values in rows.items():
        for dim, value in zip((2, 3, 4, 5), values):
            if method == "ga":
                cells.append(ReproductionCell(
                    table=table, label=f"L={size} M={dim}", method="ga", objective=objective,
                    published_value=value, structure=StructureKind.FREE.value, dim=dim, size=size,
                ))
            else:
                side = round(size ** 0.5)
                cells.append(ReproductionCell(
                    table=table, label=f"L={size} M={dim}", method="sa", objective=objective,
                    published_value=value, structure=StructureKind.POWERS_AB.value, dim=dim,
                    p=side - 1, q=side - 1,
                ))
    return cells


def _around_120(table: str, objective: str, values: Dict[str, float]) -> List[ReproductionCell]:
    ab, abc = StructureKind.POWERS_AB.value, StructureKind.POWERS_ABC.value
    return [
        ReproductionCell(table, "SA akblcm L=125", "sa", objective, values["sa125"], abc, p=4, q=4, r=4),
        ReproductionCell(table, "SA akbl L=120", "sa", objective, values["sa120"], ab, p=11, q=9),
        ReproductionCell(table, "SA akbl L=121", "sa", objective, values["sa121"], ab, p=10, q=10),
        ReproductionCell(table, "grid akbl L=120", "grid", objective, values["grid120"], ab, p=11, q=9),
        ReproductionCell(table, "GA L=120", "ga", objective, values["ga120"],
                         StructureKind.FREE.value, size=120),
    ]


def _general(table: str, objective: str, values: Sequence[float]) -> List[ReproductionCell]:
    return [
        ReproductionCell(
            table=table, label=f"akb-general L={size}", method="sa", objective=objective,
            published_value=value, structure=StructureKind.GENERAL_AKB.value, dim=2, T=4, p=size - 1,
        )
        for size, value in zip(range(3, 10), values)
    ]


def _tables() -> Dict[str, List[ReproductionCell]]:
    akbl, ab, akbk = StructureKind.POWERS_AB, StructureKind.WORD_CHAIN_AB, StructureKind.DIAGONAL_POWERS_AB
    akblcm, abc, akbkck = (StructureKind.POWERS_ABC, StructureKind.WORD_CHAIN_ABC,
                           StructureKind.DIAGONAL_POWERS_ABC)
    builtins = [
        ReproductionCell("builtins", "orthogonal121 product", "builtin", "product", 0.1992, "orthogonal121"),
        ReproductionCell("builtins", "orthogonal121 sum", "builtin", "sum", 0.1992, "orthogonal121"),
        ReproductionCell("builtins", "sl2f5 product", "builtin", "product", 0.309, "sl2f5"),
        ReproductionCell("builtins", "sl2f5 sum", "builtin", "sum", 0.309, "sl2f5"),
        # Published as min |det(Psi - Psi')| = 0.0278, i.e. (2 * 0.0834)^2
        ReproductionCell("builtins", "numderived121 product", "builtin", "product", 0.0834, "numderived121"),
        ReproductionCell("builtins", "numderived121 sum", "builtin", "sum", 0.3886, "numderived121"),
        ReproductionCell("builtins", "g214 product", "builtin", "product", 0.3851, "g214"),
        ReproductionCell("builtins", "g214improved product", "builtin", "product", 0.3874, "g214improved"),
    ]
    return {
        "builtins": builtins,
        "1": _around_120("1", "product", {"sa125": 0.2127, "sa120": 0.2202, "sa121": 0.2417,
                                          "grid120": 0.1914, "ga120": 0.2377}),
        "2": _by_structure("2", "product", {
            akbl: (0.3860, 0.3781, 0.2742, 0.1025, 0.0866, 0.0834, 0.0158),
            ab: (0.3205, 0.2659, 0.2450, 0.1030, 0.0800, 0.0579, 0.0122),
            akbk: (0.3769, 0.3502, 0.3090, 0.1651, 0.1342, 0.0820, 0.0187),
        }, _TWO_GENERATOR_SIZES, _two_generator_bounds) + _by_structure("2", "product", {
            akblcm: (0.3418, 0.2616, 0.1833, 0.1401, 0.0632, 0.1012, 0.0031),
            abc: (0.3299, 0.1832, 0.1033, 0.0725, 0.0555, 0.0430, None),
            akbkck: (0.4122, 0.2512, 0.0583, 0.0206, 0.0087, 0.0039, None),
        }, _THREE_GENERATOR_SIZES, _three_generator_bounds),
        "3": _around_120("3", "sum", {"sa125": 0.3919, "sa120": 0.3696, "sa121": 0.3886,
                                      "grid120": 0.3673, "ga120": 0.3867}),
        "4": _by_structure("4", "sum", {
            akbl: (0.5113, 0.4733, 0.4474, 0.2875, 0.2504, 0.1848, 0.0785),
            ab: (0.5530, 0.4240, 0.3821, 0.1994, 0.1629, 0.1064, 0.0310),
            akbk: (0.5466, 0.5121, 0.4735, 0.3088, 0.2637, 0.2047, 0.0869),
        }, _TWO_GENERATOR_SIZES, _two_generator_bounds) + _by_structure("4", "sum", {
            akblcm: (0.5400, 0.4210, 0.2992, 0.2663, 0.2099, 0.2060, 0.0772),
            abc: (0.5382, 0.4497, 0.2614, 0.2065, 0.1695, 0.1447, 0.0398),
            akbkck: (0.5630, 0.4271, 0.2864, 0.2198, 0.1969, 0.1423, None),
        }, _THREE_GENERATOR_SIZES, _three_generator_bounds),
        "5": _by_dimension("5", "sa", "product", {
            4: (0.7071, 0.7657, 0.7388, 0.6768),
            9: (0.5701, 0.5754, 0.4774, 0.4259),
            16: (0.4018, 0.4574, 0.4651, 0.3877),
            25: (0.3443, 0.3834, 0.3809, 0.3467),
            36: (0.2865, 0.3450, 0.3501, 0.3760),
        }),
        "6": _by_dimension("6", "sa", "sum", {
            4: (0.8147, 0.8160, 0.7861, 0.7377),
            9: (0.6956, 0.6861, 0.6539, 0.6389),
            16: (0.5908, 0.6459, 0.6288, 0.5916),
            25: (0.5618, 0.6268, 0.6190, 0.5795),
            36: (0.5286, 0.6054, 0.6148, 0.5853),
        }),
        "7": _by_dimension("7", "ga", "product", {
            3: (0.8644, 0.8264, 0.7305, 0.6737),
            4: (0.8051, 0.7343, 0.6521, 0.6305),
            6: (0.6924, 0.6632, 0.6154, 0.5721),
            10: (0.5768, 0.5497, 0.5742, 0.4942),
        }),
        "8": _by_dimension("8", "ga", "sum", {
            3: (0.8601, 0.8331, 0.8118, 0.7798),
            4: (0.8029, 0.7802, 0.7757, 0.7492),
            6: (0.7443, 0.7502, 0.7293, 0.7176),
            10: (0.6826, 0.6981, 0.6920, 0.6817),
        }),
        "9": _general("9", "sum", (0.8654, 0.7901, 0.7889, 0.7652, 0.7514, 0.7422, 0.7369)),
        "10": _general("10", "product", (0.8582, 0.7424, 0.7330, 0.6450, 0.6361, 0.6216, 0.5822)),
    }


TABLE_IDS = ("builtins",) + tuple(str(k) for k in range(1, 11))


class TableReproducer:
    """Runs table cells under a per-cell time budget"""

    @staticmethod
    def cells(table_id: str) -> List[ReproductionCell]:
        """Cells of a table in published order"""
        tables = _tables()
        if table_id not in tables:
            raise ValidationError(f"table: unknown id '{table_id}', available: {', '.join(TABLE_IDS)}")
        return tables[table_id]

    @staticmethod
    def run_cell(cell: ReproductionCell, seed: int, budget_seconds: float) -> float:
        """Achieved metric value for one cell"""
        objective = _objective(cell.objective)
        if cell.method == "builtin":
            report = DiversityCalculator.report(builtin(cell.structure))
            return report.product if cell.objective == "product" else report.sum
        if cell.method == "sa":
            cfg = SAConfig(seed=seed, budget_seconds=budget_seconds,
                           max_iterations=10 ** 9, stall_limit=10 ** 9)
            return SimulatedAnnealingOptimizer.run(cell.template(), objective, cfg).best_value
        if cell.method == "grid":
            return GridSearchOptimizer.run(cell.template(), objective, GRID_DENSITY,
                                           budget_seconds=budget_seconds).best_value
        if cell.method == "ga":
            cfg = GAConfig(seed=seed, population_size=cell.size, budget_seconds=budget_seconds,
                           max_iterations=10 ** 9, stall_limit=10 ** 9)
            return GeneticOptimizer.run(cell.dim, cell.size, objective, cfg).best_value
        raise ValidationError(f"method: unknown cell method '{cell.method}'")

    @staticmethod
    def run_table(table_id: str, seed: int, budget_seconds: float = DEFAULT_CELL_BUDGET,
                  only: Optional[Sequence[int]] = None) -> pd.DataFrame:
        """
        Achieved against published values for every cell of a table.

        Args:
            table_id: one of TABLE_IDS
            seed: master seed; cell k runs with the k-th spawned seed
            budget_seconds: wall-clock budget per optimizer cell
            only: optional cell indices to run

        Returns:
            DataFrame (table, cell, method, objective, published, achieved, seconds)
        """
        if budget_seconds <= 0:
            raise ValidationError(f"budget_seconds: must be positive, got {budget_seconds}")
        cells = TableReproducer.cells(table_id)
        selected = range(len(cells)) if only is None else list(only)
        for k in selected:
            if not 0 <= k < len(cells):
                raise ValidationError(f"cell: index {k} out of range 0..{len(cells) - 1}")
        seeds = seed_utils.spawn_seeds(seed, len(cells))

        rows = []
        for k in selected:
            cell = cells[k]
            watch = Stopwatch()
            achieved = TableReproducer.run_cell(cell, seeds[k], budget_seconds)
            logger.info(f"table {table_id} cell {k} ({cell.label}): {achieved:.4f} vs {cell.published_value}")
            rows.append({
                "table": cell.table,
                "cell": k,
                "label": cell.label,
                "method": cell.method,
                "objective": cell.objective,
                "published": cell.published_value,
                "achieved": achieved,
                "seconds": round(watch.elapsed(), 1),
            })
        return pd.DataFrame(rows)


def reproduce(table_id: str, seed: int, budget_seconds: float = DEFAULT_CELL_BUDGET,
              only: Optional[Sequence[int]] = None) -> pd.DataFrame:
    """Achieved vs published values for a table"""
    return TableReproducer.run_table(table_id, seed, budget_seconds, only)


# Global reproducer instance
table_reproducer = TableReproducer()
