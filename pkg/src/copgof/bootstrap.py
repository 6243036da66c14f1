"""Parametric bootstrap calibration of the goodness-of-fit statistics.

Each replicate regenerates a censored sample from the fitted copula:
dependent uniforms come from the fitted model, event times from the
inverse marginal Kaplan-Meier curves, and censoring times from the
inverse censoring Kaplan-Meier (one shared censoring variable by
default). The null copula is refit on every replicate and the statistic
recomputed, giving a bootstrap standard deviation. The reported p-value
is the two-sided normal tail of the observed statistic standardized by
that deviation around its null value.

Replicate b of family f draws from stream index f * 2^20 + b of the
master seed, so results are independent of worker count and of which
other families are being tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import copulas, inference, numerics, survival
from ._parallel import ordered_map
from .copulas import CopulaModel, Family, FAMILY_ORDER, LikelihoodError
from .inference import FitResult, InferenceError, StatisticValue
from .numerics import RngStream
from .survival import CensoredPair, StepSurvival

B_CAP = 1 << 20
_RETRY_OFFSET = B_CAP >> 1
MIN_REPLICATE_FRACTION = 0.8


class BootstrapError(Exception):
    pass


@dataclass(frozen=True)
class BootstrapConfig:
    b: int = 200
    seed: int = 0
    statistic: str = "ir"
    common_censoring: bool = True
    alpha: float = 0.05

    def __post_init__(self):
        if self.b < 2:
            raise ValueError(f"need at least 2 bootstrap replicates, got {self.b}")
        if self.b > B_CAP:
            raise ValueError(f"at most {B_CAP} bootstrap replicates supported")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class GofReport:
    family: Family
    theta_hat: float
    statistic: StatisticValue
    sigma_b: float
    p_value: float
    b_requested: int
    b_used: int
    seed: int
    n: int
    censoring_rates: tuple[float, float]
    degenerate: bool
    loglik: float
    converged: bool

    def reject(self, alpha: float) -> bool:
        return bool(self.p_value < alpha)


@dataclass(frozen=True)
class _Frame:
    """Everything a replicate worker needs, picklable."""
    model: CopulaModel
    event1: StepSurvival
    event2: StepSurvival
    cens1: StepSurvival
    cens2: StepSurvival
    common_censoring: bool
    n: int
    kinds: tuple[str, ...]
    master_seed: int
    family_index: int


def _inverse_many(curve: StepSurvival, u: np.ndarray) -> np.ndarray:
    """Vectorized km_inverse over an array of levels."""
    u = np.asarray(u, dtype=float)
    jt, vals = curve.jump_times, curve.values
    if jt.size == 0:
        return np.full(u.shape, np.inf)
    idx = np.searchsorted(-vals, -u, side="left")
    out = jt[np.minimum(idx, jt.size - 1)]  # below the final plateau: last jump
    return np.where(u >= 1.0, 0.0, out)


def generate_bootstrap_dataset(frame: _Frame, stream_index: int) -> list[CensoredPair]:
    """One parametric bootstrap sample from the fitted model."""
    gen = RngStream(frame.master_seed, stream_index).generator()
    n = frame.n
    u1, u2 = copulas.sample_pairs(frame.model, gen, n)
    t1 = _inverse_many(frame.event1, u1)
    t2 = _inverse_many(frame.event2, u2)
    if frame.common_censoring:
        v = gen.random(n)
        c1 = c2 = _inverse_many(frame.cens1, v)
    else:
        v1 = gen.random(n)
        v2 = gen.random(n)
        c1 = _inverse_many(frame.cens1, v1)
        c2 = _inverse_many(frame.cens2, v2)
    x1 = np.minimum(t1, c1)
    x2 = np.minimum(t2, c2)
    d1 = (t1 <= c1).astype(int)
    d2 = (t2 <= c2).astype(int)
    return [CensoredPair(float(a), float(b), int(e), int(f))
            for a, b, e, f in zip(x1, x2, d1, d2)]


def _replicate_stats(frame: _Frame, stream_index: int) -> dict[str, float]:
    pairs = generate_bootstrap_dataset(frame, stream_index)
    u1, u2, d1, d2 = survival.pseudo_observations(pairs)
    fit = inference.fit_pmle(frame.model.family, u1, u2, d1, d2,
                             initial_theta=frame.model.theta)
    out = {}
    for kind in frame.kinds:
        out[kind] = inference.compute_statistic(kind, fit, u1, u2, d1, d2).value
    return out


def _run_replicate(args) -> tuple[int, dict[str, float] | None]:
    """Worker body: try the primary stream, retry once on a fresh
    sub-stream, and report a drop if both attempts fail."""
    frame, b = args
    base = frame.family_index * B_CAP
    for stream in (base + b, base + _RETRY_OFFSET + b):
        try:
            return b, _replicate_stats(frame, stream)
        except (InferenceError, LikelihoodError, numerics.NumericsError,
                survival.SurvivalError, ValueError):
            continue
    return b, None


def _censoring_rates(d1, d2) -> tuple[float, float]:
    return (float(1.0 - np.asarray(d1, dtype=float).mean()),
            float(1.0 - np.asarray(d2, dtype=float).mean()))


def _pvalue(observed: float, null_value: float, sigma_b: float) -> tuple[float, bool]:
    if sigma_b == 0.0:
        return (1.0 if observed == null_value else 0.0), True
    z = abs(observed - null_value) / sigma_b
    return float(2.0 * (1.0 - numerics.norm_cdf(z))), False


def _build_frame(pairs, fit: FitResult, kinds, config: BootstrapConfig) -> _Frame:
    x1 = [p.x1 for p in pairs]
    x2 = [p.x2 for p in pairs]
    d1 = [p.d1 for p in pairs]
    d2 = [p.d2 for p in pairs]
    event1 = survival.kaplan_meier(x1, d1)
    event2 = survival.kaplan_meier(x2, d2)
    if config.common_censoring:
        cens1 = cens2 = survival.censoring_survival(pairs, margin=1, common=True)
    else:
        cens1 = survival.censoring_survival(pairs, margin=1)
        cens2 = survival.censoring_survival(pairs, margin=2)
    return _Frame(model=fit.model, event1=event1, event2=event2,
                  cens1=cens1, cens2=cens2,
                  common_censoring=config.common_censoring,
                  n=len(pairs), kinds=tuple(kinds),
                  master_seed=config.seed,
                  family_index=FAMILY_ORDER.index(fit.family))


def bootstrap_reports(pairs, family: Family, config: BootstrapConfig,
                      kinds=None, fit: FitResult | None = None) -> dict[str, GofReport]:
    """Full test for one null family, one report per statistic kind.

    Replicate fits are shared across kinds, so asking for ir, white and
    logim together costs the same as any one of them.
    """
    pairs = list(pairs)
    kinds = tuple(k.lower() for k in (kinds or (config.statistic,)))
    for k in kinds:
        if k not in inference.STATISTIC_KINDS:
            valid = "|".join(inference.STATISTIC_KINDS)
            raise ValueError(f"unknown statistic {k!r}; expected one of {valid}")
    u1, u2, d1, d2 = survival.pseudo_observations(pairs)
    if fit is None:
        fit = inference.fit_pmle(family, u1, u2, d1, d2)
    observed = {k: inference.compute_statistic(k, fit, u1, u2, d1, d2) for k in kinds}

    frame = _build_frame(pairs, fit, kinds, config)
    results = ordered_map(_run_replicate, [(frame, b) for b in range(config.b)])
    kept = [stats for _, stats in results if stats is not None]
    floor = math.ceil(MIN_REPLICATE_FRACTION * config.b)
    if len(kept) < floor:
        raise BootstrapError(
            f"only {len(kept)} of {config.b} bootstrap replicates succeeded "
            f"for {family.value}; at least {floor} are required")

    rates = _censoring_rates(d1, d2)
    reports = {}
    for k in kinds:
        draws = np.array([s[k] for s in kept])
        sigma_b = float(draws.std(ddof=1))
        p, degenerate = _pvalue(observed[k].value, observed[k].null_value, sigma_b)
        reports[k] = GofReport(
            family=family, theta_hat=fit.theta_hat, statistic=observed[k],
            sigma_b=sigma_b, p_value=p, b_requested=config.b, b_used=len(kept),
            seed=config.seed, n=len(pairs), censoring_rates=rates,
            degenerate=degenerate, loglik=fit.loglik, converged=fit.converged)
    return reports


def bootstrap_pvalue(pairs, family: Family, config: BootstrapConfig) -> GofReport:
    return bootstrap_reports(pairs, family, config)[config.statistic.lower()]


@dataclass(frozen=True)
class SelectionEntry:
    family: Family
    report: GofReport | None
    error: str | None = None


@dataclass(frozen=True)
class SelectionResult:
    entries: tuple[SelectionEntry, ...]

    @property
    def best(self) -> SelectionEntry:
        return self.entries[0]


def select_copula(pairs, families, config: BootstrapConfig) -> SelectionResult:
    """Test each candidate family and rank by bootstrap p-value.

    Ties break on pseudo-log-likelihood, then family name. Families
    whose fit or bootstrap fails are ranked last and carry the error
    message instead of a report. Duplicate candidates are collapsed.
    """
    seen = []
    for f in families:
        if f not in seen:
            seen.append(f)
    if not seen:
        raise ValueError("no candidate families given")
    entries = []
    for fam in seen:
        try:
            rep = bootstrap_pvalue(pairs, fam, config)
            entries.append(SelectionEntry(family=fam, report=rep))
        except (InferenceError, LikelihoodError, BootstrapError,
                numerics.NumericsError, survival.SurvivalError) as exc:
            entries.append(SelectionEntry(family=fam, report=None, error=str(exc)))

    def sort_key(e: SelectionEntry):
        if e.report is None:
            return (1, 0.0, 0.0, e.family.value)
        return (0, -e.report.p_value, -e.report.loglik, e.family.value)

    entries.sort(key=sort_key)
    return SelectionResult(entries=tuple(entries))


def critical_value_decision(report: GofReport, alpha: float) -> bool:
    """True when the null family is rejected at level alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return bool(report.p_value < alpha)
