"""Normalized scores for radar-style summaries."""

from ...errors import DegenerateBounds


def normalize_axis(value: float, blind: float, specialist: float) -> float:
    """Map a metric onto [0, 1] between the blind-guess and specialist anchors.

    The ratio (value - blind) / (specialist - blind) is already orientation-free: for a
    lower-is-better metric the specialist anchor lies below the blind one, and both the
    numerator and denominator change sign together.

    Args:
        value: Metric of the run being scored
        blind: Metric of the blind-guess baseline (maps to 0)
        specialist: Metric of the specialist baseline (maps to 1)

    Returns:
        Score clamped to [0, 1]

    Raises:
        DegenerateBounds: If both anchors are equal
    """
    if specialist == blind:
        raise DegenerateBounds(f"Anchors coincide (blind == specialist == {blind})")
    score = (value - blind) / (specialist - blind)
    return min(1.0, max(0.0, score))
