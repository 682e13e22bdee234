"""Per-antigen-type anomaly scores and the thresholds used to classify them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ddca.core import EngineConfig, PresentationRecord, RunLog, SignalInstance, cell_statistics

ANOMALOUS = "anomalous"
NORMAL = "normal"
K_ALPHA_MODES = ("literal", "weighted")


@dataclass(frozen=True)
class ThresholdSet:
    t_k: float | None
    s_k: float
    i_s: int
    i_bar: float | None
    mcav_threshold: float | None


@dataclass(frozen=True)
class AntigenTypeReport:
    antigen_type: str
    presented_total: int
    mature_count: int
    mcav: float | None
    k_alpha: float | None
    mcav_class: str | None
    k_class: str | None


def _counts(records: Iterable[PresentationRecord], antigen_type: str):
    for rec in records:
        n = rec.profile.get(antigen_type, 0)
        if n:
            yield rec.k_value, n


def mcav(records: Iterable[PresentationRecord], antigen_type: str) -> float | None:
    """Fraction of presented antigen of this type carried by mature (k > 0) cells.

    Returns None if the type was never presented.
    """
    mature = total = 0
    for k, n in _counts(records, antigen_type):
        total += n
        if k > 0:
            mature += n
    if total == 0:
        return None
    return mature / total


def k_alpha(
    records: Iterable[PresentationRecord], antigen_type: str, mode: str = "literal"
) -> float | None:
    """Context per presented antigen of one type.

    ``literal`` sums each presenting cell's k once; ``weighted`` weights
    each cell's k by how many antigens of the type it carried. Both divide
    by the total presented count. None if the type was never presented.
    """
    if mode not in K_ALPHA_MODES:
        raise ValueError(f"unknown k_alpha mode {mode!r}; expected one of {K_ALPHA_MODES}")
    num = 0.0
    den = 0
    for k, n in _counts(records, antigen_type):
        num += k if mode == "literal" else k * n
        den += n
    if den == 0:
        return None
    return num / den


def t_k_value(s_k: float, i_s: int, i_bar: float) -> float:
    if i_s < 1:
        raise ValueError("threshold undefined without signal instances")
    return s_k / i_s * i_bar


def signal_sum(signals: Sequence[SignalInstance]) -> float:
    """Sum of danger minus twice the sum of safe."""
    return sum(s.danger for s in signals) - 2.0 * sum(s.safe for s in signals)


def t_k_threshold(signals: Sequence[SignalInstance], i_bar: float) -> tuple[float, int, float]:
    """Returns ``(s_k, i_s, t_k)`` for the given signal instances."""
    i_s = len(signals)
    if i_s == 0:
        raise ValueError("threshold undefined without signal instances")
    s_k = signal_sum(signals)
    return s_k, i_s, t_k_value(s_k, i_s, i_bar)


def mcav_threshold(signals: Sequence[SignalInstance]) -> float:
    total_safe = sum(s.safe for s in signals)
    if total_safe <= 0:
        raise ValueError("danger/safe ratio undefined: total safe signal is zero")
    return sum(s.danger for s in signals) / total_safe


def classify(score: float | None, threshold: float | None) -> str | None:
    """Strictly above the threshold is anomalous; absent inputs stay unclassified."""
    if score is None or threshold is None:
        return None
    return ANOMALOUS if score > threshold else NORMAL


def compute_thresholds(
    log: RunLog,
    config: EngineConfig,
    signals: Sequence[SignalInstance],
    manual_mcav_threshold: float | None = None,
) -> ThresholdSet:
    i_bar, _ = cell_statistics(log, config)
    i_s = len(signals)
    s_k = signal_sum(signals)
    t_k = t_k_value(s_k, i_s, i_bar) if (i_s and i_bar is not None) else None
    if manual_mcav_threshold is not None:
        m_thr = manual_mcav_threshold
    else:
        try:
            m_thr = mcav_threshold(signals)
        except ValueError:
            m_thr = None
    return ThresholdSet(t_k=t_k, s_k=s_k, i_s=i_s, i_bar=i_bar, mcav_threshold=m_thr)


def build_reports(
    log: RunLog, thresholds: ThresholdSet, mode: str = "literal"
) -> list[AntigenTypeReport]:
    """One report per antigen type seen in the run, sorted by label."""
    if mode not in K_ALPHA_MODES:
        raise ValueError(f"unknown k_alpha mode {mode!r}; expected one of {K_ALPHA_MODES}")
    # label -> [presented, mature, context numerator]
    acc: dict[str, list] = {label: [0, 0, 0.0] for label in log.unpresented_profile}
    for rec in log.records:
        k = rec.k_value
        for label, n in rec.profile.items():
            if not n:
                continue
            a = acc.setdefault(label, [0, 0, 0.0])
            a[0] += n
            if k > 0:
                a[1] += n
            a[2] += k if mode == "literal" else k * n
    reports = []
    for label in sorted(acc):
        total, mature, num = acc[label]
        m = mature / total if total else None
        ka = num / total if total else None
        reports.append(
            AntigenTypeReport(
                antigen_type=label,
                presented_total=total,
                mature_count=mature,
                mcav=m,
                k_alpha=ka,
                mcav_class=classify(m, thresholds.mcav_threshold),
                k_class=classify(ka, thresholds.t_k),
            )
        )
    return reports
