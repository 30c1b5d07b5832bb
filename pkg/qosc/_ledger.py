"""Run ledger: one sqlite row per CLI invocation, written through logging"""
import logging
from dataclasses import asdict
from dataclasses import dataclass
from datetime import datetime
from datetime import timezone
from pathlib import Path
from time import process_time
from typing import Any
from typing import List
from typing import Literal
from typing import Optional

from sqlalchemy import Column
from sqlalchemy import create_engine
from sqlalchemy import Float
from sqlalchemy import insert
from sqlalchemy import inspection
from sqlalchemy import Integer
from sqlalchemy import MetaData
from sqlalchemy import sql
from sqlalchemy import String
from sqlalchemy import Table
from sqlalchemy import update

RUNS_TABLE = "runs"
# LogRecord attributes carrying a ledger entry
RUN_ATTR = "run_record"
ACTION_ATTR = "run_action"


def runs_columns() -> List[Column]:
    return [
        Column("run_key", String, primary_key=True),
        Column("command", String, nullable=False),
        Column("params", String),
        Column("started", String),
        Column("cpu_time", Float),
        Column("status", Integer),
        Column("output", String),
    ]


@dataclass(frozen=True)
class RunRecord:
    """Fields of one ledger row; None leaves a column untouched"""

    run_key: str
    command: Optional[str] = None
    params: Optional[str] = None
    started: Optional[str] = None
    cpu_time: Optional[float] = None
    status: Optional[int] = None
    output: Optional[str] = None

    def values(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}


def _is_ledger_entry(record: logging.LogRecord) -> bool:
    return isinstance(getattr(record, RUN_ATTR, None), RunRecord)


class DBHandler(logging.Handler):
    """Write the RunRecord attached to a log record as an insert or update.

    Records without a RunRecord are ignored, so the handler can share a logger
    with the console.
    """

    def __init__(self, filename: Path | str, table_name: str, cols: List[Column]):
        self.db = Path(filename).absolute()
        md = MetaData()
        self.log_table = Table(table_name, md, *cols)
        self.eng = create_engine("sqlite:///" + str(self.db))
        with self.eng.begin() as conn:
            if not inspection.inspect(conn).has_table(table_name):
                md.create_all(conn)

        super().__init__()
        self.addFilter(_is_ledger_entry)

    def emit(self, record: logging.LogRecord):
        stmt = self.statement(getattr(record, RUN_ATTR), getattr(record, ACTION_ATTR))
        with self.eng.begin() as conn:
            conn.execute(stmt)

    def statement(self, run: RunRecord, action: str) -> sql.Insert | sql.Update:
        values = run.values()
        if action == "insert":
            return insert(self.log_table).values(values)
        if action == "update":
            key = values.pop("run_key")
            return (
                update(self.log_table)
                .where(self.log_table.c.run_key == key)
                .values(values)
            )
        raise ValueError(f"Cannot write ledger action {action!r} for run {run.run_key}")


def init_run_logger(ledger: Optional[Path | str], debug: bool) -> logging.Logger:
    """Logger for CLI runs: console always, the sqlite ledger when given"""
    run_logger = logging.Logger("qosc.runs")
    run_logger.setLevel(logging.DEBUG if debug else logging.INFO)
    console = logging.StreamHandler()
    console.addFilter(lambda rec: not _is_ledger_entry(rec))
    run_logger.addHandler(console)
    if ledger is not None:
        run_logger.addHandler(DBHandler(ledger, RUNS_TABLE, runs_columns()))
    return run_logger


def _log_entry(
    run_logger: logging.Logger, run: RunRecord, action: Literal["insert", "update"]
) -> None:
    run_logger.info(
        f"run entry: {action} {run.run_key}",
        extra={RUN_ATTR: run, ACTION_ATTR: action},
    )


def log_start_run(
    run_logger: logging.Logger, run_key: str, command: str, params: str
) -> float:
    utc_now = datetime.now(timezone.utc)
    started = utc_now.strftime("%Y-%m-%d %H:%M:%S %Z")
    _log_entry(
        run_logger, RunRecord(run_key, command, params or None, started), "insert"
    )
    run_logger.info(f"Running {command} ({run_key}) at time: {started}")
    return process_time()


def log_finish_run(
    run_logger: logging.Logger,
    run_key: str,
    status: int,
    output: str,
    start_time: float,
) -> None:
    utc_now = datetime.now(timezone.utc)
    run_logger.info(
        "Finished at time: "
        + utc_now.strftime("%Y-%m-%d %H:%M:%S %Z")
        + f".  Exit status: {status}"
    )
    run = RunRecord(
        run_key,
        cpu_time=process_time() - start_time,
        status=status,
        output=output,
    )
    _log_entry(run_logger, run, "update")
