"""
Markdown comparison report for SummaryMixing vs MHSA benchmark rows
"""
from typing import Dict, Optional

import pandas as pd

from src.encoder.config import MixingKind
from src.reporting.base_report_generator import BaseReportGenerator, RowSource, rows_frame


def comparison_table(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Per-duration comparison of the two mixing kinds

    speedup is MHSA RTF over SummaryMixing RTF; memory_delta_pct is the
    extra modeled MHSA memory relative to SummaryMixing, in percent.
    """
    sm = frame[frame['mixing'] == MixingKind.SUMMARY_MIXING.value].set_index('duration_s')
    mhsa = frame[frame['mixing'] == MixingKind.MHSA.value].set_index('duration_s')
    joined = sm[['rtf', 'modeled_peak_bytes']].join(
        mhsa[['rtf', 'modeled_peak_bytes']], how='inner', lsuffix='_sm', rsuffix='_mhsa'
    )
    joined['speedup'] = joined['rtf_mhsa'] / joined['rtf_sm']
    joined['memory_delta_pct'] = (
        (joined['modeled_peak_bytes_mhsa'] - joined['modeled_peak_bytes_sm'])
        / joined['modeled_peak_bytes_sm'] * 100.0
    )
    return joined.reset_index().sort_values('duration_s').reset_index(drop=True)


def _format_bytes(value) -> str:
    if value is None or pd.isna(value):
        return "-"
    value = float(value)
    for unit in ("B", "KiB", "MiB", "GiB"):
        if abs(value) < 1024 or unit == "GiB":
            return f"{value:.0f} {unit}" if unit == "B" else f"{value:.1f} {unit}"
        value /= 1024.0


class MarkdownReportGenerator(BaseReportGenerator):
    """Generates the Markdown comparison report"""

    extension = ".md"

    def generate_report(self, rows: RowSource, output_file) -> str:
        """Generate Markdown report"""
        frame = rows_frame(rows)
        return self._write_text(output_file, self.render(frame))

    def render(self, frame: pd.DataFrame) -> str:
        stats = self._calculate_statistics(frame)
        content_parts = [
            self._generate_header(),
            self._generate_run_summary(stats),
            self._generate_comparison_section(frame),
            self._generate_results_table(frame),
            self._generate_memory_check(frame),
            self._generate_footer(),
        ]
        return '\n\n'.join(part for part in content_parts if part) + '\n'

    def _generate_header(self) -> str:
        lines = [f"# 📊 {self.title}"]
        if self.metadata:
            lines.append("")
            lines.extend(f"- **{key}:** `{value}`" for key, value in self.metadata.items())
        return '\n'.join(lines)

    def _generate_run_summary(self, stats: Dict[str, Dict[str, float]]) -> str:
        if not stats:
            return "## 📋 Summary\n\nNo benchmark rows."
        lines = [
            "## 📋 Summary",
            "",
            "| Mixing | Rows | Mean RTF | RTF growth (longest/shortest) | Max modeled memory |",
            "|--------|------|----------|-------------------------------|--------------------|",
        ]
        for mixing, values in stats.items():
            lines.append(
                f"| {mixing} | {values['rows']} | {values['mean_rtf']:.4f} | "
                f"{values['rtf_growth']:.2f}x | {_format_bytes(values['max_modeled_peak_bytes'])} |"
            )
        return '\n'.join(lines)

    def _generate_comparison_section(self, frame: pd.DataFrame) -> Optional[str]:
        table = comparison_table(frame)
        if table.empty:
            return "## ⚖️ SummaryMixing vs MHSA\n\nNeeds rows of both mixing kinds at the same durations."
        lines = [
            "## ⚖️ SummaryMixing vs MHSA",
            "",
            "| Duration (s) | RTF SummaryMixing | RTF MHSA | Speed-up | Memory SummaryMixing | Memory MHSA | Memory delta |",
            "|--------------|-------------------|----------|----------|----------------------|-------------|--------------|",
        ]
        for row in table.itertuples(index=False):
            lines.append(
                f"| {row.duration_s:g} | {row.rtf_sm:.4f} | {row.rtf_mhsa:.4f} | {row.speedup:.2f}x | "
                f"{_format_bytes(row.modeled_peak_bytes_sm)} | {_format_bytes(row.modeled_peak_bytes_mhsa)} | "
                f"{row.memory_delta_pct:+.1f}% |"
            )
        return '\n'.join(lines)

    def _generate_results_table(self, frame: pd.DataFrame) -> str:
        lines = [
            "## 📈 Results",
            "",
            "| Mixing | Duration (s) | Chunk (ms) | Left context | Mean (ms) | p95 (ms) | RTF |",
            "|--------|--------------|------------|--------------|-----------|----------|-----|",
        ]
        for row in frame.itertuples(index=False):
            lines.append(
                f"| {row.mixing} | {row.duration_s:g} | {row.chunk_ms:g} | {row.left_context} | "
                f"{row.wall_ms_mean:.2f} | {row.wall_ms_p95:.2f} | {row.rtf:.4f} |"
            )
        return '\n'.join(lines)

    def _generate_memory_check(self, frame: pd.DataFrame) -> Optional[str]:
        """Measured/modeled ratio per row, only when measurements exist"""
        measured = pd.to_numeric(frame['measured_peak_bytes'], errors='coerce')
        if measured.isna().all():
            return None
        lines = [
            "## 💾 Measured vs modeled peak memory",
            "",
            "| Mixing | Duration (s) | Modeled | Measured | Ratio |",
            "|--------|--------------|---------|----------|-------|",
        ]
        for row, value in zip(frame.itertuples(index=False), measured):
            if pd.isna(value):
                continue
            ratio = value / row.modeled_peak_bytes if row.modeled_peak_bytes else float('nan')
            flag = "" if 0.5 <= ratio <= 2.0 else " ⚠️"
            lines.append(
                f"| {row.mixing} | {row.duration_s:g} | {_format_bytes(row.modeled_peak_bytes)} | "
                f"{_format_bytes(value)} | {ratio:.2f}{flag} |"
            )
        return '\n'.join(lines)

    def _generate_footer(self) -> str:
        return "---\n*RTF = wall-clock seconds / audio seconds. Memory covers one masked whole-utterance pass.*"
