"""ROC/AUC computation, score-threshold confusion counts, and diel grids.

ROC sweeps group tied scores into a single threshold step and integrate by
trapezoid; curves always run from (0,0) to (1,1). Diel grids bin events
onto a local-date x time-of-day plane with a night shading mask derived
from the sign of the solar elevation at each bin center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date as date_type
from datetime import datetime, timedelta

import numpy as np

from .errors import DegenerateTruthError, PolarLatitudeError
from .features import FeatureVector

MINUTES_PER_DAY = 1440


@dataclass
class RocCurve:
    points: list[tuple[float, float]]   # (fpr, tpr), starts (0,0), ends (1,1)
    thresholds: list[float]             # aligned with points; +inf at (0,0)
    auc: float


@dataclass
class Site:
    lat_deg: float
    lon_deg: float
    utc_offset_hours: float = 0.0


@dataclass
class DielGrid:
    dates: list[date_type]
    bins_per_day: int
    counts: np.ndarray      # [dates x bins] int
    night_mask: np.ndarray  # [dates x bins] bool
    site: Site


def roc_curve(scores, truths) -> RocCurve:
    """ROC of a continuous score against boolean truth.

    Thresholds sweep the distinct score values from high to low; all items
    sharing a score cross the threshold together.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(truths, dtype=bool)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and truths must be equal-length 1-d sequences")
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DegenerateTruthError("need at least one positive and one negative")

    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]

    points = [(0.0, 0.0)]
    thresholds = [math.inf]
    tp = fp = 0
    i = 0
    while i < s.size:
        j = i
        while j < s.size and s[j] == s[i]:
            tp += bool(y[j])
            fp += not y[j]
            j += 1
        points.append((fp / n_neg, tp / n_pos))
        thresholds.append(float(s[i]))
        i = j

    auc = 0.0
    for (x0, y0), (x1, y1) in zip(points[:-1], points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2.0
    return RocCurve(points=points, thresholds=thresholds, auc=auc)


def tpr_at_fpr(curve: RocCurve, fpr_cap: float) -> float:
    """Step-function TPR at the largest swept point with fpr <= cap."""
    best = 0.0
    for fpr, tpr in curve.points:
        if fpr <= fpr_cap:
            best = max(best, tpr)
    return best


def confusion_at(predicted_scores, truths, tau: int) -> tuple[int, int, int, int]:
    """(tp, fp, tn, fn) when 'predicted positive' means score >= tau."""
    if tau not in range(5):
        raise ValueError(f"tau {tau} outside 0..4")
    tp = fp = tn = fn = 0
    for score, truth in zip(predicted_scores, truths, strict=True):
        positive = score >= tau
        if positive and truth:
            tp += 1
        elif positive:
            fp += 1
        elif truth:
            fn += 1
        else:
            tn += 1
    return tp, fp, tn, fn


def baseline_score(fv: FeatureVector) -> float:
    """Single-feature comparison ranker: the SNR re the 5th percentile."""
    return float(fv.values[14])


def solar_elevation_deg(
    day: date_type, minute_of_day: float, lat_deg: float, lon_deg: float, utc_offset_hours: float
) -> float:
    """Solar elevation at a local wall-clock minute.

    Fractional-year approximation: equation of time and declination from a
    low-order trigonometric series, then elevation via the hour angle.
    Accurate to a few minutes of sunrise/sunset timing, which is well inside
    the 10-minute diel bin width.
    """
    hours_utc = minute_of_day / 60.0 - utc_offset_hours
    doy = day.timetuple().tm_yday
    gamma = 2.0 * math.pi / 365.0 * (doy - 1 + (hours_utc - 12.0) / 24.0)

    eqtime_min = 229.18 * (
        0.000075
        + 0.001868 * math.cos(gamma)
        - 0.032077 * math.sin(gamma)
        - 0.014615 * math.cos(2 * gamma)
        - 0.040849 * math.sin(2 * gamma)
    )
    decl = (
        0.006918
        - 0.399912 * math.cos(gamma)
        + 0.070257 * math.sin(gamma)
        - 0.006758 * math.cos(2 * gamma)
        + 0.000907 * math.sin(2 * gamma)
        - 0.002697 * math.cos(3 * gamma)
        + 0.00148 * math.sin(3 * gamma)
    )

    time_offset = eqtime_min + 4.0 * lon_deg - 60.0 * utc_offset_hours
    true_solar_min = minute_of_day + time_offset
    hour_angle = math.radians(true_solar_min / 4.0 - 180.0)

    lat = math.radians(lat_deg)
    cos_zenith = math.sin(lat) * math.sin(decl) + math.cos(lat) * math.cos(decl) * math.cos(hour_angle)
    cos_zenith = min(1.0, max(-1.0, cos_zenith))
    return 90.0 - math.degrees(math.acos(cos_zenith))


def day_night(
    day: date_type, minute_of_day: float, lat_deg: float, lon_deg: float, utc_offset_hours: float
) -> bool:
    """True when it is night (solar elevation below the horizon)."""
    if abs(lat_deg) >= 66.0:
        raise PolarLatitudeError(f"latitude {lat_deg} needs polar day/night handling")
    return solar_elevation_deg(day, minute_of_day, lat_deg, lon_deg, utc_offset_hours) < 0.0


def diel_grid(
    events: list[tuple[datetime, float]],
    date_range: tuple[date_type, date_type],
    bins_per_day: int,
    site: Site,
) -> DielGrid:
    """Bin events onto a (local date) x (time-of-day) grid with night shading.

    Each event is a (start_utc, local offset hours) pair; events outside
    the date range are dropped. Counts are conserved for in-range events.
    """
    if MINUTES_PER_DAY % bins_per_day != 0:
        raise ValueError(f"bins_per_day {bins_per_day} does not divide {MINUTES_PER_DAY}")
    d0, d1 = date_range
    if d1 < d0:
        raise ValueError("date range inverted")

    n_days = (d1 - d0).days + 1
    dates = [d0 + timedelta(days=i) for i in range(n_days)]
    bin_width_min = MINUTES_PER_DAY // bins_per_day

    counts = np.zeros((n_days, bins_per_day), dtype=np.int64)
    for when_utc, offset_hours in events:
        local = when_utc + timedelta(hours=offset_hours)
        d = local.date()
        if not d0 <= d <= d1:
            continue
        minute = local.hour * 60 + local.minute + local.second / 60.0
        counts[(d - d0).days, int(minute // bin_width_min)] += 1

    night = np.zeros((n_days, bins_per_day), dtype=bool)
    for i, d in enumerate(dates):
        for b in range(bins_per_day):
            center = (b + 0.5) * bin_width_min
            night[i, b] = day_night(d, center, site.lat_deg, site.lon_deg, site.utc_offset_hours)

    return DielGrid(dates=dates, bins_per_day=bins_per_day, counts=counts, night_mask=night, site=site)
