"""
Tabular output for the command line
"""

import sys
from typing import Iterable, Optional, Tuple

import pandas as pd

from ..config.settings import Config
from ..constellation.constellation import Constellation, rate
from ..diversity.diversity import DiversityReport
from ..optimize.objective import OptimizerTrace
from ..utils.helpers import format_utils, snr_utils


class OutputFormatter:
    """DataFrame construction and fixed-precision rendering"""

    @staticmethod
    def frame_text(df: pd.DataFrame) -> str:
        """Whitespace-aligned table with 12 significant digits"""
        if df.empty:
            return "(no rows)"
        return df.to_string(index=False, float_format=format_utils.format_value)

    @staticmethod
    def write_frame(df: pd.DataFrame, path: str):
        """CSV with 12 significant digits"""
        df.to_csv(path, index=False, float_format=Config.FLOAT_FORMAT)

    @staticmethod
    def emit(df: pd.DataFrame, path: Optional[str] = None):
        """Print the table, or write it as CSV when a path is given"""
        if path:
            OutputFormatter.write_frame(df, path)
        else:
            print(OutputFormatter.frame_text(df))

    @staticmethod
    def report_frame(name: str, c: Constellation, report: DiversityReport) -> pd.DataFrame:
        """One row: size, shape, rate, product and sum with their pairs"""
        return pd.DataFrame([{
            "constellation": name,
            "L": c.L,
            "T": c.T,
            "M": c.M,
            "rate": rate(c).rate,
            "product": report.product,
            "argmin_product": format_utils.format_pair(report.argmin_product),
            "sum": report.sum,
            "argmin_sum": format_utils.format_pair(report.argmin_sum),
        }])

    @staticmethod
    def trace_summary(trace: OptimizerTrace, structure: str) -> pd.DataFrame:
        """One row describing an optimizer run"""
        return pd.DataFrame([{
            "method": trace.method,
            "structure": structure,
            "objective": trace.objective.label(),
            "L": trace.final.L,
            "best_value": trace.best_value,
            "product": trace.final_report.product,
            "sum": trace.final_report.sum,
            "iterations": len(trace.iterations),
            "accepted": trace.accepted_count,
            "rejected": trace.rejected_count,
            "seconds": round(trace.elapsed_seconds, 1),
        }])

    @staticmethod
    def curve_frame(points: Iterable[Tuple[float, float]]) -> pd.DataFrame:
        """Rows (rho_db, rho_linear, value)"""
        return pd.DataFrame(
            [(snr_utils.linear_to_db(rho), rho, value) for rho, value in points],
            columns=["rho_db", "rho_linear", "value"],
        )

    @staticmethod
    def status(message: str):
        """Status line on stderr, keeping stdout for data"""
        print(message, file=sys.stderr)


# Global formatter instance
output_formatter = OutputFormatter()
