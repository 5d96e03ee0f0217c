from .harness import run, sweep
from .spec import (
    CSV_HEADER,
    RunReport,
    SpecError,
    WorkloadSpec,
    render_csv,
    summarize,
    write_csv,
)

__all__ = [
    "CSV_HEADER",
    "RunReport",
    "SpecError",
    "WorkloadSpec",
    "render_csv",
    "run",
    "summarize",
    "sweep",
    "write_csv",
]
