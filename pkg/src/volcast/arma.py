"""ARMA(p, q) mean models with automatic order selection.

Estimation is by Gaussian conditional sum of squares: the residual
recursion starts from zeroed presample values, so the residual vector has
the same length as the input and the (0,0,0)-no-intercept model is an
exact no-op on the data. Orders are chosen by a stepwise BIC search in the
style of common auto-ARIMA tools.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit
from scipy import optimize

from .errors import EstimationError, InsufficientDataError, ValidationError
from .timeseries import ReturnSeries

MAX_ORDER = 5


@dataclass(frozen=True)
class ArmaOrder:
    p: int
    d: int
    q: int
    intercept: bool

    def __post_init__(self):
        if self.d != 0:
            raise ValidationError("only d = 0 is supported (inputs are returns)")
        if not (0 <= self.p <= MAX_ORDER and 0 <= self.q <= MAX_ORDER):
            raise ValidationError(
                f"orders must lie in [0, {MAX_ORDER}], got p={self.p} q={self.q}"
            )

    @property
    def n_params(self) -> int:
        """Estimated parameter count including the innovation variance."""
        return self.p + self.q + int(self.intercept) + 1


@dataclass(frozen=True)
class ArmaFit:
    order: ArmaOrder
    ar_coeffs: np.ndarray
    ma_coeffs: np.ndarray
    intercept_value: float
    residuals: ReturnSeries
    loglik: float
    aic: float
    bic: float
    n: int
    candidates_evaluated: int = 1

    def __post_init__(self):
        ar = np.asarray(self.ar_coeffs, dtype=np.float64).copy()
        ma = np.asarray(self.ma_coeffs, dtype=np.float64).copy()
        ar.setflags(write=False)
        ma.setflags(write=False)
        object.__setattr__(self, "ar_coeffs", ar)
        object.__setattr__(self, "ma_coeffs", ma)

    def to_dict(self) -> dict:
        return {
            "order": {
                "p": self.order.p,
                "d": self.order.d,
                "q": self.order.q,
                "intercept": self.order.intercept,
            },
            "ar_coeffs": [float(v) for v in self.ar_coeffs],
            "ma_coeffs": [float(v) for v in self.ma_coeffs],
            "intercept_value": float(self.intercept_value),
            "loglik": float(self.loglik),
            "aic": float(self.aic),
            "bic": float(self.bic),
            "n": int(self.n),
            "candidates_evaluated": int(self.candidates_evaluated),
        }


@njit(cache=True)
def _css_residuals(x, c, phi, theta):
    """One-step prediction errors with zeroed presample history."""
    n = x.size
    p = phi.size
    q = theta.size
    e = np.zeros(n)
    for t in range(n):
        acc = x[t] - c
        for i in range(p):
            if t - 1 - i >= 0:
                acc -= phi[i] * x[t - 1 - i]
        for j in range(q):
            if t - 1 - j >= 0:
                acc -= theta[j] * e[t - 1 - j]
        e[t] = acc
    return e


def _gaussian_css_loglik(ssr: float, n: int) -> float:
    sigma2 = ssr / n
    if sigma2 <= 0.0:
        # a perfectly interpolating mean model; not meaningful for returns
        raise EstimationError("zero residual variance in ARMA fit")
    return -0.5 * n * (math.log(2.0 * math.pi * sigma2) + 1.0)


def _check_roots(coeffs: np.ndarray, label: str) -> None:
    """AR: 1 - sum phi_i z^i; MA: 1 + sum theta_j z^j. Roots must lie
    strictly outside the unit circle."""
    if coeffs.size == 0:
        return
    if label == "AR":
        poly = np.concatenate([-coeffs[::-1], [1.0]])
    else:
        poly = np.concatenate([coeffs[::-1], [1.0]])
    roots = np.roots(poly)
    if roots.size and np.min(np.abs(roots)) <= 1.0:
        name = "stationarity" if label == "AR" else "invertibility"
        raise EstimationError(f"{label} polynomial violates {name}")


def _pack(c, phi, theta, intercept):
    parts = ([c] if intercept else []) + list(phi) + list(theta)
    return np.array(parts, dtype=np.float64)


def _unpack(vec, p, q, intercept):
    idx = 0
    if intercept:
        c = float(vec[0])
        idx = 1
    else:
        c = 0.0
    phi = np.asarray(vec[idx : idx + p], dtype=np.float64)
    theta = np.asarray(vec[idx + p : idx + p + q], dtype=np.float64)
    return c, phi, theta


def fit_arma(series: ReturnSeries, order: ArmaOrder) -> ArmaFit:
    """Fit one ARMA specification by conditional sum of squares."""
    x = series.values
    n = x.size
    if n <= 10 * (order.p + order.q + 1):
        raise InsufficientDataError(
            f"ARMA({order.p},0,{order.q}) needs more than "
            f"{10 * (order.p + order.q + 1)} observations, got {n}"
        )

    p, q, intercept = order.p, order.q, order.intercept
    if p == 0 and q == 0:
        c = float(np.mean(x)) if intercept else 0.0
        phi = np.empty(0)
        theta = np.empty(0)
    elif q == 0:
        # pure AR: the zero-padded recursion is linear in (c, phi)
        cols = []
        if intercept:
            cols.append(np.ones(n))
        for i in range(1, p + 1):
            lag = np.zeros(n)
            lag[i:] = x[:-i]
            cols.append(lag)
        design = np.column_stack(cols)
        beta, *_ = np.linalg.lstsq(design, x, rcond=None)
        c, phi, theta = _unpack(beta, p, q, intercept)
    else:
        def ssr(vec):
            c_, phi_, theta_ = _unpack(vec, p, q, intercept)
            e = _css_residuals(x, c_, phi_, theta_)
            val = float(np.dot(e, e))
            return val if math.isfinite(val) else 1e300

        x0 = _pack(np.mean(x) if intercept else 0.0, np.zeros(p), np.zeros(q), intercept)
        res = optimize.minimize(ssr, x0, method="BFGS", options={"maxiter": 500})
        if not np.all(np.isfinite(res.x)):
            raise EstimationError("ARMA optimizer diverged")
        c, phi, theta = _unpack(res.x, p, q, intercept)

    _check_roots(phi, "AR")
    _check_roots(theta, "MA")

    if p == 0 and q == 0 and not intercept:
        e = x.copy()
    else:
        e = _css_residuals(x, c, phi, theta)
    ssr_val = float(np.dot(e, e))
    loglik = _gaussian_css_loglik(ssr_val, n)
    k = order.n_params
    aic = 2.0 * k - 2.0 * loglik
    bic = k * math.log(n) - 2.0 * loglik

    residuals = ReturnSeries(
        dates=series.dates,
        values=e,
        kind=series.kind,
        source_symbol=series.source_symbol,
    )
    return ArmaFit(
        order=order,
        ar_coeffs=phi,
        ma_coeffs=theta,
        intercept_value=c,
        residuals=residuals,
        loglik=loglik,
        aic=aic,
        bic=bic,
        n=n,
    )


def _criterion_value(fit: ArmaFit, criterion: str) -> float:
    return fit.aic if criterion == "aic" else fit.bic


def _selection_key(fit: ArmaFit, criterion: str):
    # parsimony tie-break: smaller p+q, then smaller q, then no intercept
    o = fit.order
    return (_criterion_value(fit, criterion), o.p + o.q, o.q, o.intercept)


def select_arma(
    series: ReturnSeries,
    max_p: int = MAX_ORDER,
    max_q: int = MAX_ORDER,
    criterion: str = "bic",
    candidate_log: list | None = None,
) -> ArmaFit:
    """Stepwise order search minimizing an information criterion.

    Starts from (0,0,0) and (1,0,1), tries both intercept variants of
    every visited order, expands by unit moves in p and q, and stops when
    no neighbor of the incumbent improves the criterion. The returned fit
    carries the number of candidate fits attempted in
    ``candidates_evaluated``.
    """
    if criterion not in ("aic", "bic"):
        raise ValidationError(f"criterion must be 'aic' or 'bic', got {criterion!r}")
    if not (0 <= max_p <= MAX_ORDER and 0 <= max_q <= MAX_ORDER):
        raise ValidationError(f"max orders must lie in [0, {MAX_ORDER}]")
    largest = 10 * (max_p + max_q + 1)
    if len(series) <= largest:
        raise InsufficientDataError(
            f"order selection up to ({max_p},{max_q}) needs more than "
            f"{largest} observations, got {len(series)}"
        )

    evaluated: dict[tuple[int, int, bool], ArmaFit | None] = {}
    attempts = 0

    def try_fit(p: int, q: int, intercept: bool) -> None:
        nonlocal attempts
        key = (p, q, intercept)
        if key in evaluated:
            return
        attempts += 1
        try:
            fit = fit_arma(series, ArmaOrder(p=p, d=0, q=q, intercept=intercept))
        except EstimationError:
            fit = None
        evaluated[key] = fit
        if candidate_log is not None:
            candidate_log.append(
                (key, None if fit is None else _criterion_value(fit, criterion))
            )

    def best_fit() -> ArmaFit | None:
        fits = [f for f in evaluated.values() if f is not None]
        if not fits:
            return None
        return min(fits, key=lambda f: _selection_key(f, criterion))

    for p, q in ((0, 0), (min(1, max_p), min(1, max_q))):
        for intercept in (False, True):
            try_fit(p, q, intercept)

    incumbent = best_fit()
    if incumbent is None:
        raise EstimationError("all starting ARMA candidates failed")

    while True:
        p0, q0 = incumbent.order.p, incumbent.order.q
        neighbors = [
            (p0 + 1, q0),
            (p0 - 1, q0),
            (p0, q0 + 1),
            (p0, q0 - 1),
        ]
        for p, q in neighbors:
            if 0 <= p <= max_p and 0 <= q <= max_q:
                for intercept in (False, True):
                    try_fit(p, q, intercept)
        challenger = best_fit()
        if challenger is None or (
            _selection_key(challenger, criterion)
            >= _selection_key(incumbent, criterion)
        ):
            break
        incumbent = challenger

    return replace(incumbent, candidates_evaluated=attempts)
