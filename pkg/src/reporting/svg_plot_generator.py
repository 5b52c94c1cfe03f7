"""
SVG line chart of RTF against utterance duration, one series per mixing kind
"""
from typing import List, Tuple
from xml.sax.saxutils import escape, quoteattr

import pandas as pd

from src.reporting.base_report_generator import BaseReportGenerator, RowSource, rows_frame

WIDTH, HEIGHT = 640, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 20, 40, 50
SERIES_COLORS = {"summary_mixing": "#366092", "mhsa": "#c0504d"}
FALLBACK_COLORS = ["#9bbb59", "#8064a2", "#4bacc6", "#f79646"]
NUM_TICKS = 5


def _ticks(low: float, high: float, count: int = NUM_TICKS) -> List[float]:
    if high <= low:
        return [low]
    step = (high - low) / (count - 1)
    return [low + i * step for i in range(count)]


class SvgPlotGenerator(BaseReportGenerator):
    """Renders rtf vs duration_s as polylines with point markers and a legend"""

    extension = ".svg"

    def generate_report(self, rows: RowSource, output_file) -> str:
        return self._write_text(output_file, self.render(rows_frame(rows)))

    def render(self, frame: pd.DataFrame) -> str:
        plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        x_low = float(frame['duration_s'].min()) if not frame.empty else 0.0
        x_high = float(frame['duration_s'].max()) if not frame.empty else 1.0
        y_high = float(frame['rtf'].max()) * 1.1 if not frame.empty else 1.0
        if x_high <= x_low:
            x_low, x_high = x_low - 1.0, x_high + 1.0
        if y_high <= 0:
            y_high = 1.0

        def to_xy(duration: float, rtf: float) -> Tuple[float, float]:
            x = MARGIN_LEFT + (duration - x_low) / (x_high - x_low) * plot_w
            y = MARGIN_TOP + plot_h - rtf / y_high * plot_h
            return x, y

        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<title>{escape(self.title)}</title>',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="16">{escape(self.title)}</text>',
        ]
        parts.extend(self._generate_axes(plot_w, plot_h, x_low, x_high, y_high, to_xy))
        parts.extend(self._generate_series(frame, to_xy))
        parts.append('</svg>')
        return '\n'.join(parts) + '\n'

    def _generate_axes(self, plot_w, plot_h, x_low, x_high, y_high, to_xy) -> List[str]:
        x0, y0 = MARGIN_LEFT, MARGIN_TOP + plot_h
        parts = [
            f'<g class="axes" stroke="black" stroke-width="1">',
            f'<line class="x-axis" x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}"/>',
            f'<line class="y-axis" x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}"/>',
            '</g>',
        ]
        for value in _ticks(x_low, x_high):
            x, _ = to_xy(value, 0.0)
            parts.append(f'<text class="x-tick" x="{x:.1f}" y="{y0 + 18}" text-anchor="middle" '
                         f'font-size="11">{value:g}</text>')
        for value in _ticks(0.0, y_high):
            _, y = to_xy(x_low, value)
            parts.append(f'<text class="y-tick" x="{x0 - 8}" y="{y + 4:.1f}" text-anchor="end" '
                         f'font-size="11">{value:.3g}</text>')
        parts.append(f'<text x="{x0 + plot_w / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle" '
                     f'font-size="12">utterance duration (s)</text>')
        parts.append(f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" font-size="12" '
                     f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.1f})">RTF</text>')
        return parts

    def _generate_series(self, frame: pd.DataFrame, to_xy) -> List[str]:
        parts = []
        fallback = iter(FALLBACK_COLORS * 4)
        for index, (mixing, group) in enumerate(frame.groupby('mixing', sort=True)):
            color = SERIES_COLORS.get(mixing) or next(fallback)
            group = group.sort_values('duration_s')
            points = [to_xy(float(d), float(r)) for d, r in zip(group['duration_s'], group['rtf'])]
            point_text = ' '.join(f'{x:.1f},{y:.1f}' for x, y in points)
            parts.append(f'<g class="series" data-mixing={quoteattr(mixing)}>')
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{point_text}"/>')
            parts.extend(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" fill="{color}"/>' for x, y in points)
            parts.append('</g>')
            legend_y = MARGIN_TOP + 10 + 16 * index
            legend_x = WIDTH - MARGIN_RIGHT - 140
            parts.append(f'<g class="legend"><rect x="{legend_x}" y="{legend_y - 8}" width="10" height="10" '
                         f'fill="{color}"/><text x="{legend_x + 16}" y="{legend_y + 1}" font-size="11">'
                         f'{escape(mixing)}</text></g>')
        return parts
