"""
Reporting Package

Writes benchmark runs as CSV, JSON, Excel, a Markdown comparison or an SVG chart,
and parses emitted CSV/JSON reports back.
"""

from .base_report_generator import BaseReportGenerator, rows_frame
from .tabular_report_generator import CsvReportGenerator, JsonReportGenerator, XlsxReportGenerator
from .markdown_report_generator import MarkdownReportGenerator, comparison_table
from .svg_plot_generator import SvgPlotGenerator
from .report_generator import (
    REPORT_FORMATS, ReportGenerator, emit_report, format_for_path, load_bench_rows, load_report_csv,
    load_report_json, load_reports,
)

__all__ = [
    'BaseReportGenerator', 'rows_frame', 'CsvReportGenerator', 'JsonReportGenerator',
    'XlsxReportGenerator', 'MarkdownReportGenerator', 'comparison_table', 'SvgPlotGenerator',
    'REPORT_FORMATS', 'ReportGenerator', 'emit_report', 'format_for_path', 'load_bench_rows',
    'load_report_csv', 'load_report_json', 'load_reports',
]
