"""
Run archive: optimizer and simulation results recorded in SQLite
"""

import sqlite3
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Optional

import pandas as pd

from ..config.settings import DatabaseConfig
from ..constellation.serializer import ConstellationSerializer
from ..optimize.objective import OptimizerTrace
from ..simulation.channel_sim import SimulationResult


class RunDatabaseManager:
    """Manages the run archive database"""

    def __init__(self, db_path: str = None):
        self.db_path = db_path or DatabaseConfig.DATABASE_PATH

    @contextmanager
    def get_connection(self):
        """Context manager for database connections"""
        conn = sqlite3.connect(self.db_path)
        try:
            yield conn
        finally:
            conn.close()

    def init_database(self):
        """Create the archive tables if missing"""
        with self.get_connection() as conn:
            cursor = conn.cursor()
            for table_config in DatabaseConfig.TABLES.values():
                cursor.execute(table_config["schema"])
            conn.commit()

    @staticmethod
    def _now() -> str:
        return datetime.now(timezone.utc).isoformat(timespec="seconds")

    def record_optimization(self, trace: OptimizerTrace, structure: str) -> int:
        """Store an optimizer run with its final constellation; returns the row id"""
        self.init_database()
        final = trace.final
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(
                """INSERT INTO optimization_runs
                   (created_at, method, objective, goal, structure, size, dim, seed,
                    best_value, iterations, elapsed_seconds, constellation)
                   VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)""",
                (
                    self._now(), trace.method, trace.objective.label(),
                    "max" if trace.objective.maximizes else "min",
                    structure, final.L, final.M, str(trace.seed), trace.best_value,
                    len(trace.iterations), trace.elapsed_seconds,
                    ConstellationSerializer.serialize(final).decode("utf-8"),
                ),
            )
            conn.commit()
            return cursor.lastrowid

    def record_simulation(self, result: SimulationResult) -> int:
        """Store one row per SNR point; returns the number of rows written"""
        self.init_database()
        created = self._now()
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.executemany(
                """INSERT INTO simulation_runs
                   (created_at, label, seed, receive_antennas, rho_db, trials,
                    errors, bler, wilson_lo, wilson_hi)
                   VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)""",
                [
                    (created, result.label, str(result.seed), result.receive_antennas,
                     p.rho_db, p.trials, p.errors, p.bler, p.wilson_lo, p.wilson_hi)
                    for p in result.points
                ],
            )
            conn.commit()
            return len(result.points)

    def get_optimization_runs(self, method: Optional[str] = None) -> pd.DataFrame:
        """Archived optimizer runs, newest first, without the stored constellations"""
        self.init_database()
        query = ("SELECT id, created_at, method, objective, goal, structure, size, dim, seed, "
                 "best_value, iterations, elapsed_seconds FROM optimization_runs")
        params = ()
        if method:
            query += " WHERE method=?"
            params = (method,)
        query += " ORDER BY id DESC"
        with self.get_connection() as conn:
            return pd.read_sql_query(query, conn, params=params)

    def get_best_runs(self) -> pd.DataFrame:
        """Best run per (objective, structure, size, dim)"""
        runs = self.get_optimization_runs()
        if runs.empty:
            return runs
        signed = runs["best_value"].where(runs["goal"] == "max", -runs["best_value"])
        best_index = signed.groupby([runs["objective"], runs["structure"], runs["size"], runs["dim"]]).idxmax()
        return runs.loc[best_index.values].sort_values(["structure", "size"]).reset_index(drop=True)

    def get_simulation_runs(self, label: Optional[str] = None) -> pd.DataFrame:
        """Archived simulation rows"""
        self.init_database()
        query = "SELECT * FROM simulation_runs"
        params = ()
        if label:
            query += " WHERE label=?"
            params = (label,)
        query += " ORDER BY id"
        with self.get_connection() as conn:
            return pd.read_sql_query(query, conn, params=params)

    def load_constellation(self, run_id: int):
        """Final constellation of an archived optimizer run, or None"""
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute("SELECT constellation FROM optimization_runs WHERE id=?", (run_id,))
            row = cursor.fetchone()
        if row is None:
            return None
        return ConstellationSerializer.deserialize(row[0].encode("utf-8"))


# Global database instance
run_db_manager = RunDatabaseManager()
