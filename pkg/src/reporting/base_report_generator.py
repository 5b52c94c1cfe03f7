"""
Base class for benchmark report generators
"""
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import pandas as pd

from src.exceptions import ReportWriteError
from src.models.bench_run import BenchRow, BenchRun, CSV_COLUMNS

logger = logging.getLogger(__name__)

RowSource = Union[pd.DataFrame, BenchRun, Iterable[BenchRun], Iterable[BenchRow]]


def rows_frame(source: RowSource) -> pd.DataFrame:
    """
    Benchmark rows as a DataFrame in CSV column order, sorted by mixing then duration

    Accepts a DataFrame, a BenchRun, several BenchRuns or bare BenchRows.
    """
    if isinstance(source, pd.DataFrame):
        frame = source.copy()
    else:
        if isinstance(source, BenchRun):
            source = [source]
        records: List[dict] = []
        for item in source:
            if isinstance(item, BenchRun):
                records.extend(item.rows_as_dicts())
            else:
                records.append(item.to_dict())
        frame = pd.DataFrame.from_records(records, columns=CSV_COLUMNS)
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ReportWriteError(f"benchmark rows are missing columns: {missing}")
    frame = frame[CSV_COLUMNS]
    return frame.sort_values(['mixing', 'duration_s'], kind='stable').reset_index(drop=True)


class BaseReportGenerator(ABC):
    """Abstract base class for all report generators"""

    extension = ""

    def __init__(self, title: str = "Streaming encoder benchmark",
                 metadata: Optional[Dict[str, Any]] = None):
        """
        Initialize the report generator

        Args:
            title: heading used by the human-readable formats
            metadata: run settings written alongside the rows where the format allows
        """
        self.title = title
        self.metadata = dict(metadata or {})

    @abstractmethod
    def generate_report(self, rows: RowSource, output_file: Union[str, Path]) -> str:
        """Write the report and return its path"""

    def _ensure_output_dir(self, output_file: Union[str, Path]) -> Path:
        """Create the parent directory of output_file and return it as a Path"""
        output_path = Path(output_file)
        try:
            output_path.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ReportWriteError(f"Cannot create report directory {output_path.parent}: {e}")
        if output_path.is_dir():
            raise ReportWriteError(f"Report path is a directory: {output_path}")
        return output_path

    def _write_text(self, output_file: Union[str, Path], content: str) -> str:
        output_path = self._ensure_output_dir(output_file)
        try:
            with open(output_path, 'w', encoding='utf-8', newline='') as f:
                f.write(content)
        except OSError as e:
            raise ReportWriteError(f"Cannot write report {output_path}: {e}")
        logger.debug("Wrote %s", output_path)
        return str(output_path)

    def _calculate_statistics(self, frame: pd.DataFrame) -> Dict[str, Dict[str, float]]:
        """Per-mixing summary: row count, mean RTF, RTF growth from shortest to longest"""
        if frame.empty:
            return {}

        stats = {}
        for mixing, group in frame.groupby('mixing', sort=True):
            group = group.sort_values('duration_s')
            first_rtf = float(group['rtf'].iloc[0])
            last_rtf = float(group['rtf'].iloc[-1])
            stats[mixing] = {
                'rows': int(len(group)),
                'mean_rtf': float(group['rtf'].mean()),
                'rtf_growth': last_rtf / first_rtf if first_rtf > 0 else float('nan'),
                'max_modeled_peak_bytes': int(group['modeled_peak_bytes'].max()),
                'shortest_s': float(group['duration_s'].iloc[0]),
                'longest_s': float(group['duration_s'].iloc[-1]),
            }
        return stats
