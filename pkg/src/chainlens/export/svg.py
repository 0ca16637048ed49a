"""Radar chart of normalized task scores, one polygon per run."""

from typing import Mapping, Optional, Sequence, TextIO, Tuple
import math

import svgwrite


class RadarExporter:
    """Export normalized scores as an SVG radar chart.

    Every axis is one task metric scaled to [0, 1]; 0 sits at the center (blind
    guess) and 1 on the outer ring (specialist). Colors cycle through a fixed
    palette in run order.
    """

    COLORS = (
        "#2C3E50",  # dark gray-blue
        "#C0392B",
        "#27AE60",
        "#2980B9",
        "#8E44AD",
        "#D35400",
        "#16A085",
        "#7F8C8D",
    )

    def __init__(self, radius: float = 160.0, rings: int = 4):
        """Initialize the exporter.

        Args:
            radius: Pixels from the center to the outer ring
            rings: Concentric guide rings, evenly spaced
        """
        if radius <= 0:
            raise ValueError(f"radius must be positive (got {radius})")
        if rings < 1:
            raise ValueError(f"rings must be at least 1 (got {rings})")
        self.radius = radius
        self.rings = rings

    def _vertex(self, center: float, index: int, count: int, value: float) -> Tuple[float, float]:
        # first axis points straight up, the rest follow clockwise
        angle = -math.pi / 2 + 2 * math.pi * index / count
        r = self.radius * min(1.0, max(0.0, value))
        return (round(center + r * math.cos(angle), 2), round(center + r * math.sin(angle), 2))

    def export(
        self,
        axes: Sequence[str],
        series: Mapping[str, Sequence[Optional[float]]],
        output: TextIO,
        title: str = "Normalized scores",
    ) -> None:
        """Write the chart.

        Args:
            axes: Axis labels in drawing order
            series: Run name to one score per axis; None is drawn at 0
            output: File object to write SVG to
            title: Chart title
        """
        margin = 110.0
        side = 2 * (self.radius + margin)
        center = side / 2
        legend_height = 20 * len(series)
        dwg = svgwrite.Drawing(size=(f"{side:.0f}", f"{side + legend_height:.0f}"))
        dwg.add(dwg.rect(insert=(0, 0), size=("100%", "100%"), fill="white"))
        dwg.add(dwg.text(title, insert=(10, 20), font_family="Arial", font_size=14))

        if len(axes) < 3:
            dwg.add(
                dwg.text(
                    "Fewer than three normalized axes",
                    insert=(10, 50),
                    font_family="Arial",
                    font_size=12,
                )
            )
            dwg.write(output)
            return

        count = len(axes)
        for ring in range(1, self.rings + 1):
            points = [self._vertex(center, i, count, ring / self.rings) for i in range(count)]
            dwg.add(dwg.polygon(points, fill="none", stroke="#BDC3C7", stroke_width=1))
        for i, label in enumerate(axes):
            dwg.add(
                dwg.line(
                    start=(center, center),
                    end=self._vertex(center, i, count, 1.0),
                    stroke="#BDC3C7",
                    stroke_width=1,
                )
            )
            x, y = self._vertex(center, i, count, 1.12)
            dwg.add(
                dwg.text(
                    label,
                    insert=(x, y),
                    font_family="Arial",
                    font_size=11,
                    text_anchor="middle",
                )
            )

        for n, (name, values) in enumerate(series.items()):
            if len(values) != count:
                raise ValueError(f"Run '{name}' has {len(values)} scores for {count} axes")
            color = self.COLORS[n % len(self.COLORS)]
            points = [self._vertex(center, i, count, v or 0.0) for i, v in enumerate(values)]
            dwg.add(
                dwg.polygon(
                    points,
                    fill=color,
                    fill_opacity=0.15,
                    stroke=color,
                    stroke_width=2,
                )
            )
            self._add_legend(dwg, name, color, side + 20 * n)

        dwg.write(output)

    def _add_legend(self, dwg: svgwrite.Drawing, name: str, color: str, y: float) -> None:
        dwg.add(dwg.rect(insert=(10, y - 12), size=(15, 15), fill=color))
        dwg.add(dwg.text(name, insert=(30, y), font_family="Arial", font_size=12))
