"""Static SVG charts drawn with Qt's SVG generator (no window is ever shown)."""
from __future__ import annotations

import os
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")

from PySide6.QtCore import QPointF, QRect, QRectF, QSize, Qt  # noqa: E402
from PySide6.QtGui import QBrush, QColor, QFont, QGuiApplication, QPainter, QPainterPath, QPen  # noqa: E402
from PySide6.QtSvg import QSvgGenerator  # noqa: E402

from app.models.evaluation import CurveSummary, ExperimentResult  # noqa: E402

WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 64, 24, 40, 56

CRITERION_TITLES = {
    "au_ent": "AU-ent",
    "eu_ent": "EU-ent",
    "tu_ent": "TU-ent",
    "au_rl": "AU-rl",
    "eu_rl": "EU-rl",
    "random": "random",
    "oracle": "oracle",
}
SERIES_COLOUR = QColor(31, 119, 180)
BASELINE_COLOUR = QColor(127, 127, 127)


def ensure_gui_application() -> QGuiApplication:
    """Text rendering needs a Qt GUI application; reuse the running one if any."""
    app = QGuiApplication.instance()
    if app is None:
        app = QGuiApplication([])
    return app


class SvgChart:
    """One set of axes on an SVG canvas, data coordinates mapped to pixels."""

    def __init__(self, path: Path, title: str, x_range: Tuple[float, float], y_range: Tuple[float, float]):
        ensure_gui_application()
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.generator = QSvgGenerator()
        self.generator.setFileName(str(self.path))
        self.generator.setSize(QSize(WIDTH, HEIGHT))
        self.generator.setViewBox(QRect(0, 0, WIDTH, HEIGHT))
        self.generator.setTitle(title)
        self.title = title
        self.x_range = x_range
        self.y_range = y_range
        self.plot_area = QRectF(
            MARGIN_LEFT, MARGIN_TOP, WIDTH - MARGIN_LEFT - MARGIN_RIGHT, HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        )
        self.painter: Optional[QPainter] = None
        self._legend_rows = 0

    def __enter__(self) -> "SvgChart":
        self.painter = QPainter(self.generator)
        self.painter.setRenderHint(QPainter.RenderHint.Antialiasing)
        self.painter.setFont(QFont("Sans Serif", 9))
        return self

    def __exit__(self, *exc) -> None:
        self.painter.end()
        self.painter = None

    def to_pixel(self, x: float, y: float) -> QPointF:
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        px = self.plot_area.left() + (x - x0) / (x1 - x0 or 1.0) * self.plot_area.width()
        py = self.plot_area.bottom() - (y - y0) / (y1 - y0 or 1.0) * self.plot_area.height()
        return QPointF(px, py)

    def draw_axes(self, x_label: str, y_label: str, ticks: int = 5) -> None:
        p = self.painter
        p.setPen(QPen(Qt.GlobalColor.black, 1))
        p.drawRect(self.plot_area)
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        for value in np.linspace(x0, x1, ticks + 1):
            point = self.to_pixel(value, y0)
            p.drawLine(point, QPointF(point.x(), point.y() + 4))
            p.drawText(QRectF(point.x() - 30, point.y() + 6, 60, 16), Qt.AlignmentFlag.AlignCenter, f"{value:.2f}")
        for value in np.linspace(y0, y1, ticks + 1):
            point = self.to_pixel(x0, value)
            p.drawLine(point, QPointF(point.x() - 4, point.y()))
            p.drawText(QRectF(point.x() - 60, point.y() - 8, 54, 16),
                       Qt.AlignmentFlag.AlignRight | Qt.AlignmentFlag.AlignVCenter, f"{value:.2f}")
        p.drawText(QRectF(0, 8, WIDTH, 24), Qt.AlignmentFlag.AlignCenter, self.title)
        p.drawText(QRectF(self.plot_area.left(), HEIGHT - 24, self.plot_area.width(), 20),
                   Qt.AlignmentFlag.AlignCenter, x_label)
        p.save()
        p.translate(14, self.plot_area.center().y())
        p.rotate(-90)
        p.drawText(QRectF(-self.plot_area.height() / 2, -10, self.plot_area.height(), 20),
                   Qt.AlignmentFlag.AlignCenter, y_label)
        p.restore()

    def draw_band(self, x: Sequence[float], low: Sequence[float], high: Sequence[float], colour: QColor) -> None:
        path = QPainterPath(self.to_pixel(x[0], high[0]))
        for xi, hi in zip(x[1:], high[1:]):
            path.lineTo(self.to_pixel(xi, hi))
        for xi, lo in zip(reversed(x), reversed(low)):
            path.lineTo(self.to_pixel(xi, lo))
        path.closeSubpath()
        fill = QColor(colour)
        fill.setAlpha(50)
        self.painter.setPen(Qt.PenStyle.NoPen)
        self.painter.setBrush(QBrush(fill))
        self.painter.drawPath(path)
        self.painter.setBrush(Qt.BrushStyle.NoBrush)

    def draw_line(self, x: Sequence[float], y: Sequence[float], colour: QColor, label: str,
                  style: Qt.PenStyle = Qt.PenStyle.SolidLine) -> None:
        path = QPainterPath(self.to_pixel(x[0], y[0]))
        for xi, yi in zip(x[1:], y[1:]):
            path.lineTo(self.to_pixel(xi, yi))
        self.painter.setPen(QPen(colour, 2, style))
        self.painter.drawPath(path)
        self._legend(label, colour, style)

    def draw_points(self, x: Sequence[float], y: Sequence[float], colour: QColor, label: str) -> None:
        self.painter.setPen(Qt.PenStyle.NoPen)
        self.painter.setBrush(QBrush(colour))
        for xi, yi in zip(x, y):
            self.painter.drawEllipse(self.to_pixel(xi, yi), 2.5, 2.5)
        self.painter.setBrush(Qt.BrushStyle.NoBrush)
        self._legend(label, colour, Qt.PenStyle.SolidLine)

    def _legend(self, label: str, colour: QColor, style: Qt.PenStyle) -> None:
        top = self.plot_area.top() + 8 + 16 * self._legend_rows
        left = self.plot_area.right() - 120
        self.painter.setPen(QPen(colour, 2, style))
        self.painter.drawLine(QPointF(left, top + 8), QPointF(left + 20, top + 8))
        self.painter.setPen(QPen(Qt.GlobalColor.black, 1))
        self.painter.drawText(QRectF(left + 26, top, 94, 16), Qt.AlignmentFlag.AlignVCenter, label)
        self._legend_rows += 1


def _padded_range(values: np.ndarray) -> Tuple[float, float]:
    low, high = float(np.min(values)), float(np.max(values))
    if high - low < 1e-9:
        return low - 0.05, high + 0.05
    pad = 0.05 * (high - low)
    return low - pad, high + pad


def render_curves_svg(result: ExperimentResult, criterion: str, path: Path | str) -> Path:
    """Mean accuracy-rejection curve with a one-std band, random baseline overlaid."""
    summary: CurveSummary = result.curves[criterion]
    baseline = result.curves.get("random") if criterion != "random" else None
    stacked = [summary.mean - summary.std, summary.mean + summary.std]
    if baseline is not None:
        stacked.append(baseline.mean)
    y_low, y_high = _padded_range(np.concatenate(stacked))
    title = f"Accuracy-rejection: {CRITERION_TITLES.get(criterion, criterion)} ({result.n_repetitions} reps)"

    with SvgChart(Path(path), title, (0.0, 1.0), (max(0.0, y_low), min(1.0, y_high))) as chart:
        chart.draw_axes("rejection fraction", "accuracy")
        chart.draw_band(summary.rejection, summary.mean - summary.std, summary.mean + summary.std, SERIES_COLOUR)
        chart.draw_line(summary.rejection, summary.mean, SERIES_COLOUR, CRITERION_TITLES.get(criterion, criterion))
        if baseline is not None:
            chart.draw_line(baseline.rejection, baseline.mean, BASELINE_COLOUR, "random", Qt.PenStyle.DashLine)
    return Path(path)


def render_scatter_svg(x: Sequence[float], y: Sequence[float], x_label: str, y_label: str,
                       title: str, path: Path | str) -> Path:
    x_arr = np.asarray(x, dtype=np.float64)
    y_arr = np.asarray(y, dtype=np.float64)
    if x_arr.size == 0 or x_arr.shape != y_arr.shape:
        raise ValueError("scatter needs two non-empty sequences of equal length")
    with SvgChart(Path(path), title, _padded_range(x_arr), _padded_range(y_arr)) as chart:
        chart.draw_axes(x_label, y_label)
        chart.draw_points(x_arr, y_arr, SERIES_COLOUR, "test instance")
    return Path(path)
