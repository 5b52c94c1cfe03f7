"""
Tabular report generators: CSV, JSON and Excel
"""
import json
import logging
from pathlib import Path
from typing import Union

import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils import get_column_letter

from src.exceptions import ReportWriteError
from src.models.bench_run import CSV_COLUMNS
from src.reporting.base_report_generator import BaseReportGenerator, RowSource, rows_frame

logger = logging.getLogger(__name__)

HEADER_FILL = "366092"


def _with_nullable_ints(frame: pd.DataFrame) -> pd.DataFrame:
    frame = frame.copy()
    for column in ('modeled_peak_bytes', 'measured_peak_bytes'):
        frame[column] = pd.to_numeric(frame[column], errors='coerce').astype('Int64')
    frame['left_context'] = frame['left_context'].astype(str)
    return frame


class CsvReportGenerator(BaseReportGenerator):
    """One header line plus one line per duration, fixed column order"""

    extension = ".csv"

    def generate_report(self, rows: RowSource, output_file: Union[str, Path]) -> str:
        frame = _with_nullable_ints(rows_frame(rows))
        return self._write_text(output_file, frame.to_csv(index=False, lineterminator='\n'))


class JsonReportGenerator(BaseReportGenerator):
    """Run settings under "metadata", rows under "results" with the CSV field names"""

    extension = ".json"

    def generate_report(self, rows: RowSource, output_file: Union[str, Path]) -> str:
        frame = _with_nullable_ints(rows_frame(rows))
        document = {
            'metadata': self.metadata,
            'results': json.loads(frame.to_json(orient='records')),
        }
        return self._write_text(output_file, json.dumps(document, indent=2) + "\n")


class XlsxReportGenerator(BaseReportGenerator):
    """Workbook with a results sheet and a per-mixing summary sheet"""

    extension = ".xlsx"

    def generate_report(self, rows: RowSource, output_file: Union[str, Path]) -> str:
        frame = rows_frame(rows)
        output_path = self._ensure_output_dir(output_file)

        wb = Workbook()
        ws = wb.active
        ws.title = "Results"
        self._write_sheet(ws, CSV_COLUMNS, frame.itertuples(index=False, name=None))

        summary = wb.create_sheet("Summary")
        stats = self._calculate_statistics(frame)
        stat_columns = ['mixing', 'rows', 'mean_rtf', 'rtf_growth', 'max_modeled_peak_bytes',
                        'shortest_s', 'longest_s']
        self._write_sheet(summary, stat_columns,
                          ([mixing] + [values[c] for c in stat_columns[1:]] for mixing, values in stats.items()))

        try:
            wb.save(output_path)
        except OSError as e:
            raise ReportWriteError(f"Cannot write report {output_path}: {e}")
        logger.debug("Wrote %s", output_path)
        return str(output_path)

    def _write_sheet(self, ws, columns, records) -> None:
        """Styled header row followed by the records"""
        header_font = Font(bold=True, color="FFFFFF")
        header_fill = PatternFill(start_color=HEADER_FILL, end_color=HEADER_FILL, fill_type="solid")
        for col_idx, name in enumerate(columns, 1):
            cell = ws.cell(row=1, column=col_idx, value=name)
            cell.font = header_font
            cell.fill = header_fill
            cell.alignment = Alignment(horizontal="center")
            ws.column_dimensions[get_column_letter(col_idx)].width = max(12, len(name) + 4)

        for row_idx, record in enumerate(records, 2):
            for col_idx, value in enumerate(record, 1):
                if pd.isna(value):
                    value = None
                elif hasattr(value, "item"):
                    value = value.item()
                ws.cell(row=row_idx, column=col_idx, value=value)
        ws.freeze_panes = "A2"
