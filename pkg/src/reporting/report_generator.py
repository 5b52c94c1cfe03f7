"""
Report entry points
Format dispatch for writing benchmark runs and parsing emitted reports back
"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Type, Union

import pandas as pd

from src.exceptions import ConfigurationError, SummixIOError
from src.models.bench_run import BenchRow, BenchRun, CSV_COLUMNS
from src.reporting.base_report_generator import BaseReportGenerator, RowSource, rows_frame
from src.reporting.markdown_report_generator import MarkdownReportGenerator
from src.reporting.svg_plot_generator import SvgPlotGenerator
from src.reporting.tabular_report_generator import (
    CsvReportGenerator, JsonReportGenerator, XlsxReportGenerator,
)

logger = logging.getLogger(__name__)

REPORT_FORMATS: Dict[str, Type[BaseReportGenerator]] = {
    'csv': CsvReportGenerator,
    'json': JsonReportGenerator,
    'xlsx': XlsxReportGenerator,
    'md': MarkdownReportGenerator,
    'svg': SvgPlotGenerator,
}


def format_for_path(path: Union[str, Path]) -> str:
    """Report format implied by the file extension"""
    suffix = Path(path).suffix.lower().lstrip('.')
    if suffix == 'markdown':
        suffix = 'md'
    if suffix not in REPORT_FORMATS:
        raise ConfigurationError(
            f"Cannot infer report format from {path}. Available: {sorted(REPORT_FORMATS)}"
        )
    return suffix


class ReportGenerator:
    """Picks the generator for a format and writes one report"""

    def __init__(self, title: str = "Streaming encoder benchmark",
                 metadata: Optional[dict] = None):
        self.title = title
        self.metadata = dict(metadata or {})

    def generator_for(self, fmt: str) -> BaseReportGenerator:
        key = str(fmt).strip().lower()
        if key not in REPORT_FORMATS:
            raise ConfigurationError(f"Unknown report format: {fmt}. Available: {sorted(REPORT_FORMATS)}")
        return REPORT_FORMATS[key](self.title, self.metadata)

    def generate(self, rows: RowSource, fmt: Optional[str], path: Union[str, Path]) -> str:
        """Write rows in fmt (inferred from path when None) and return the path"""
        fmt = fmt or format_for_path(path)
        written = self.generator_for(fmt).generate_report(rows, path)
        logger.info("Wrote %s report to %s", fmt, written)
        return written


def run_metadata(run: BenchRun) -> dict:
    data = run.to_dict()
    data.pop('results')
    return data


def emit_report(run: BenchRun, fmt: Optional[str], path: Union[str, Path]) -> str:
    """
    Write a completed run

    Args:
        run: benchmark run with its result rows
        fmt: csv, json, xlsx, md or svg; None infers it from the path
        path: output file

    Raises:
        ConfigurationError: On an unknown format
        ReportWriteError: If the path cannot be written
    """
    return ReportGenerator(f"Benchmark {run.config_id}", run_metadata(run)).generate(run, fmt, path)


def load_report_csv(path: Union[str, Path]) -> pd.DataFrame:
    """
    Parse a CSV written by CsvReportGenerator

    Raises:
        SummixIOError: If the file is missing, unreadable or lacks columns
    """
    try:
        frame = pd.read_csv(path, dtype={'mixing': str, 'left_context': str})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise SummixIOError(f"Cannot read report {path}: {e}")
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise SummixIOError(f"Report {path} is missing columns: {missing}")
    frame = frame[CSV_COLUMNS].copy()
    for column in ('modeled_peak_bytes', 'measured_peak_bytes'):
        frame[column] = pd.to_numeric(frame[column], errors='coerce').astype('Int64')
    return frame


def load_report_json(path: Union[str, Path]) -> pd.DataFrame:
    """Parse the "results" list of a JSON report"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except OSError as e:
        raise SummixIOError(f"Cannot read report {path}: {e}")
    except json.JSONDecodeError as e:
        raise SummixIOError(f"Invalid JSON in report {path}: {e}")
    frame = pd.DataFrame.from_records(document.get('results', []), columns=CSV_COLUMNS)
    frame['left_context'] = frame['left_context'].astype(str)
    for column in ('modeled_peak_bytes', 'measured_peak_bytes'):
        frame[column] = pd.to_numeric(frame[column], errors='coerce').astype('Int64')
    return frame


def load_reports(paths: Sequence[Union[str, Path]]) -> pd.DataFrame:
    """Concatenate CSV and JSON reports into one frame"""
    if not paths:
        raise ConfigurationError("at least one report path is required")
    frames = []
    for path in paths:
        if Path(path).suffix.lower() == '.json':
            frames.append(load_report_json(path))
        else:
            frames.append(load_report_csv(path))
    return rows_frame(pd.concat(frames, ignore_index=True))


def load_bench_rows(path: Union[str, Path]) -> List[BenchRow]:
    """Rows of a CSV or JSON report as BenchRow objects"""
    frame = load_reports([path])
    rows = []
    for record in frame.to_dict(orient='records'):
        measured = record['measured_peak_bytes']
        rows.append(BenchRow(
            duration_s=float(record['duration_s']),
            mixing=str(record['mixing']),
            chunk_ms=float(record['chunk_ms']),
            left_context=str(record['left_context']),
            wall_ms_mean=float(record['wall_ms_mean']),
            wall_ms_p95=float(record['wall_ms_p95']),
            rtf=float(record['rtf']),
            modeled_peak_bytes=int(record['modeled_peak_bytes']),
            measured_peak_bytes=None if pd.isna(measured) else int(measured),
        ))
    return rows
