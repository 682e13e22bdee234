from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ddca.core import EngineConfig
from ddca.experiments import run_pipeline
from ddca.metrics import K_ALPHA_MODES
from ddca.validation import check_event_stream, check_positive_float, check_positive_int


class DeterministicDCA(BaseEstimator):
    """Deterministic dendritic cell algorithm as an unsupervised estimator.

    ``fit`` consumes one time-ordered event stream and scores every antigen
    type seen in it. Scores and labels are then queried per antigen type.

    Parameters
    ----------
    num_cells : int, default=100
        Population size.
    lifespan_limit : float, default=100.0
        Largest lifespan in the population; cell ``i`` of ``n`` gets
        ``lifespan_limit * (i + 1) / n``.
    flush_at_end : bool, default=False
        Present every live cell still holding antigen once the stream ends.
    k_alpha_mode : {"literal", "weighted"}, default="literal"
        ``literal`` counts each presenting cell's context once per type,
        ``weighted`` multiplies it by that cell's antigen count.
    mcav_threshold : float or None, default=None
        Manual MCAV threshold. None derives it from the danger/safe ratio.

    Attributes
    ----------
    antigen_types_ : ndarray of str
        Sorted labels seen during ``fit``.
    reports_ : list of AntigenTypeReport
    thresholds_ : ThresholdSet
    log_ : RunLog
    mean_iterations_, mean_incarnations_ : float or None
    wall_time_ms_ : float
    """

    def __init__(
        self,
        num_cells=100,
        lifespan_limit=100.0,
        flush_at_end=False,
        k_alpha_mode="literal",
        mcav_threshold=None,
    ):
        self.num_cells = num_cells
        self.lifespan_limit = lifespan_limit
        self.flush_at_end = flush_at_end
        self.k_alpha_mode = k_alpha_mode
        self.mcav_threshold = mcav_threshold

    def _config(self) -> EngineConfig:
        if self.k_alpha_mode not in K_ALPHA_MODES:
            raise ValueError(f"k_alpha_mode must be one of {K_ALPHA_MODES}")
        return EngineConfig(
            num_cells=check_positive_int(self.num_cells, "num_cells"),
            lifespan_limit=check_positive_float(self.lifespan_limit, "lifespan_limit"),
            flush_at_end=bool(self.flush_at_end),
        )

    def fit(self, X, y=None):
        config = self._config()
        stream = check_event_stream(X)
        result = run_pipeline(stream, config, self.k_alpha_mode, self.mcav_threshold)
        self.config_ = config
        self.log_ = result.log
        self.thresholds_ = result.thresholds
        self.reports_ = result.reports
        self.mean_iterations_ = result.mean_iterations
        self.mean_incarnations_ = result.mean_incarnations
        self.wall_time_ms_ = result.wall_time_ms
        self.antigen_types_ = np.array([r.antigen_type for r in result.reports], dtype=object)
        self._by_type = {r.antigen_type: r for r in result.reports}
        return self

    def _types(self, antigen_types):
        check_is_fitted(self, "reports_")
        if antigen_types is None:
            return list(self.antigen_types_)
        if isinstance(antigen_types, str):
            return [antigen_types]
        return list(antigen_types)

    def score_samples(self, antigen_types=None, metric="k_alpha"):
        """Raw per-type score; NaN where a type was never presented."""
        if metric not in ("k_alpha", "mcav"):
            raise ValueError("metric must be 'k_alpha' or 'mcav'")
        out = []
        for label in self._types(antigen_types):
            rep = self._by_type.get(label)
            value = getattr(rep, metric) if rep is not None else None
            out.append(np.nan if value is None else value)
        return np.asarray(out, dtype=float)

    def decision_function(self, antigen_types=None, metric="k_alpha"):
        """Score minus threshold: positive means anomalous."""
        scores = self.score_samples(antigen_types, metric)
        thr = self.thresholds_.t_k if metric == "k_alpha" else self.thresholds_.mcav_threshold
        if thr is None:
            return np.full_like(scores, np.nan)
        return scores - thr

    def predict(self, antigen_types=None, metric="k_alpha"):
        """``"anomalous"`` / ``"normal"`` per type, None where unclassified."""
        if metric not in ("k_alpha", "mcav"):
            raise ValueError("metric must be 'k_alpha' or 'mcav'")
        attr = "k_class" if metric == "k_alpha" else "mcav_class"
        labels = []
        for label in self._types(antigen_types):
            rep = self._by_type.get(label)
            labels.append(getattr(rep, attr) if rep is not None else None)
        return np.array(labels, dtype=object)

    def fit_predict(self, X, y=None, metric="k_alpha"):
        return self.fit(X).predict(metric=metric)
