"""Maximum-likelihood fits of discrete degree distributions and model selection.

Four candidate families live on the integers ``x >= xmin``:

``exponential``            P(X >= x) ~ exp(-lam x)
``powerlaw``               p(x) = x**-alpha / zeta(alpha, xmin)
``lognormal``              X = floor(Y), log Y ~ N(mu, sigma**2)
``stretched_exponential``  P(X >= x) ~ exp(-(lam x)**beta), 0 < beta <= 1

The non-power-law families are the floor of a continuous variable, so their
pmf is ``S(x) - S(x + 1)`` normalised by ``S(xmin)`` where ``S`` is the
continuous survival function. For the exponential this is exactly the
geometric distribution.

Models are compared with the normalised log-likelihood ratio test of Vuong,
as popularised for heavy-tailed data by Clauset, Shalizi & Newman (2009).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np
from scipy import optimize, special

from .errors import ConvergenceError, DegenerateFitError, InvalidComparisonError

EXPONENTIAL = "exponential"
POWERLAW = "powerlaw"
LOGNORMAL = "lognormal"
STRETCHED_EXPONENTIAL = "stretched_exponential"
MODEL_KINDS = (EXPONENTIAL, POWERLAW, LOGNORMAL, STRETCHED_EXPONENTIAL)
N_PARAMS = {EXPONENTIAL: 1, POWERLAW: 1, LOGNORMAL: 2, STRETCHED_EXPONENTIAL: 2}
# family -> special case it contains (beta = 1)
NESTED = {STRETCHED_EXPONENTIAL: EXPONENTIAL}

DEFAULT_SIGNIFICANCE = 0.1
MIN_OBSERVATIONS = 10
MIN_TAIL = 50
MIN_CONCLUSIVE = 50
ALPHA_BOUNDS = (1.0 + 1e-6, 30.0)
BETA_BOUNDS = (1e-2, 1.0)


def _log1mexp(a):
    """log(1 - exp(a)) for a <= 0, accurate near 0 and -inf."""
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    small = a > -math.log(2)
    out[small] = np.log(-np.expm1(a[small]))
    out[~small] = np.log1p(-np.exp(a[~small]))
    return out


def _log_sf(kind, params, x):
    """Log of the continuous survival function used by floor-discretised models."""
    x = np.asarray(x, dtype=float)
    if kind == EXPONENTIAL:
        return -params["lam"] * x
    if kind == LOGNORMAL:
        with np.errstate(divide="ignore"):
            z = (np.log(x) - params["mu"]) / params["sigma"]
        return special.log_ndtr(-z)
    if kind == STRETCHED_EXPONENTIAL:
        return -np.power(params["lam"] * x, params["beta"])
    raise ValueError(f"no continuous survival function for {kind!r}")


def _check_params(kind, params):
    if kind == EXPONENTIAL:
        ok = params["lam"] > 0
    elif kind == POWERLAW:
        ok = params["alpha"] > 1
    elif kind == LOGNORMAL:
        ok = params["sigma"] > 0 and math.isfinite(params["mu"])
    elif kind == STRETCHED_EXPONENTIAL:
        ok = params["lam"] > 0 and 0 < params["beta"] <= 1
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    if not ok:
        raise ValueError(f"invalid parameters for {kind}: {params}")


@dataclass(frozen=True)
class CandidateModel:
    """A parameterised model on the integers ``>= xmin``.

    ``loglikelihood`` and ``n`` describe the sample the model was fitted on
    (observations ``>= xmin``) and are ``None``/0 for hand-built models.
    """

    kind: str
    params: dict
    xmin: int = 1
    loglikelihood: float | None = None
    n: int = 0
    ks_distance: float | None = None

    def __post_init__(self):
        _check_params(self.kind, self.params)
        if int(self.xmin) != self.xmin or self.xmin < 1:
            raise ValueError("xmin must be a positive integer")

    @property
    def n_params(self) -> int:
        return N_PARAMS[self.kind]

    def log_sf(self, x, xmin=None):
        """``log P(X >= x | X >= xmin)`` for integer ``x >= xmin``."""
        xmin = self.xmin if xmin is None else xmin
        x = np.asarray(x, dtype=float)
        if self.kind == POWERLAW:
            a = self.params["alpha"]
            return np.log(special.zeta(a, x)) - math.log(special.zeta(a, xmin))
        return _log_sf(self.kind, self.params, x) - _log_sf(self.kind, self.params, xmin)

    def logpmf(self, x, xmin=None):
        """Log pmf conditioned on ``X >= xmin`` (defaults to the model's own)."""
        xmin = self.xmin if xmin is None else xmin
        x = np.asarray(x, dtype=float)
        if np.any(x < xmin):
            raise ValueError("observations below xmin")
        if self.kind == POWERLAW:
            a = self.params["alpha"]
            return -a * np.log(x) - math.log(special.zeta(a, xmin))
        lo = _log_sf(self.kind, self.params, x)
        hi = _log_sf(self.kind, self.params, x + 1)
        return lo + _log1mexp(hi - lo) - _log_sf(self.kind, self.params, xmin)

    def pmf(self, x, xmin=None):
        return np.exp(self.logpmf(x, xmin))

    def cdf(self, x, xmin=None):
        """``P(X <= x | X >= xmin)``."""
        return -np.expm1(self.log_sf(np.asarray(x, dtype=float) + 1, xmin))

    def sample(self, size, rng=None) -> np.ndarray:
        """Draw ``size`` exact variates from the model (integers >= xmin)."""
        rng = np.random.default_rng(rng)
        u = 1.0 - rng.random(size)  # (0, 1]
        if self.kind == POWERLAW:
            if self.xmin == 1:
                return rng.zipf(self.params["alpha"], size).astype(np.int64)
            return _sample_powerlaw(self.params["alpha"], self.xmin, u)
        p = self.params
        log_s = np.log(u) + _log_sf(self.kind, p, self.xmin)
        if self.kind == EXPONENTIAL:
            y = -log_s / p["lam"]
        elif self.kind == LOGNORMAL:
            y = np.exp(p["mu"] - p["sigma"] * special.ndtri(np.exp(log_s)))
        else:
            y = np.power(-log_s, 1.0 / p["beta"]) / p["lam"]
        return np.maximum(np.floor(y), self.xmin).astype(np.int64)

    def as_dict(self):
        return {"kind": self.kind, "params": dict(self.params), "xmin": int(self.xmin),
                "loglikelihood": self.loglikelihood, "n": self.n,
                "ks_distance": self.ks_distance}


def _sample_powerlaw(alpha, xmin, u):
    # largest x with P(X >= x) >= u, by doubling then bisection on integers
    z0 = special.zeta(alpha, xmin)
    lo = np.full(u.shape, float(xmin))
    hi = np.full(u.shape, float(xmin) * 2 + 1)
    while True:
        grow = special.zeta(alpha, hi) / z0 >= u
        if not grow.any():
            break
        lo[grow] = hi[grow]
        hi[grow] *= 2
    while True:
        active = hi - lo > 1
        if not active.any():
            break
        mid = np.floor((lo + hi) / 2)
        ok = special.zeta(alpha, mid) / z0 >= u
        upd = active & ok
        lo[upd] = mid[upd]
        upd = active & ~ok
        hi[upd] = mid[upd]
    return lo.astype(np.int64)


# --- fitting -----------------------------------------------------------------

class _Sample:
    """Degrees grouped as unique values with counts."""

    def __init__(self, degrees):
        x = np.asarray(degrees)
        if x.ndim != 1:
            raise ValueError("degrees must be one-dimensional")
        if len(x) < MIN_OBSERVATIONS:
            raise ValueError(f"need at least {MIN_OBSERVATIONS} observations, got {len(x)}")
        if not np.all(np.isfinite(x)) or np.any(x < 1) or np.any(x != np.floor(x)):
            raise ValueError("degrees must be positive integers")
        self.raw = x.astype(np.int64)
        self.values, self.counts = np.unique(self.raw, return_counts=True)
        if len(self.values) == 1:
            raise DegenerateFitError(f"all {len(x)} observations equal {self.values[0]}")

    def tail(self, xmin):
        m = self.values >= xmin
        return self.values[m].astype(float), self.counts[m].astype(float)


def _grouped_loglik(model, vals, counts):
    return float(np.dot(counts, model.logpmf(vals)))


def _fit_exponential(vals, counts, xmin):
    n = counts.sum()
    excess = np.dot(counts, vals - xmin) / n
    if excess <= 0:
        raise DegenerateFitError("all observations sit at xmin")
    return {"lam": math.log1p(1.0 / excess)}


def _fit_powerlaw_fixed(vals, counts, xmin):
    n = counts.sum()
    slog = np.dot(counts, np.log(vals))

    def nll(a):
        return a * slog + n * math.log(special.zeta(a, xmin))

    res = optimize.minimize_scalar(nll, bounds=ALPHA_BOUNDS, method="bounded",
                                   options={"xatol": 1e-10, "maxiter": 500})
    if not res.success:
        raise ConvergenceError("power-law alpha search failed",
                               {"xmin": xmin, "message": res.message, "nfev": res.nfev})
    return {"alpha": float(res.x)}


def _powerlaw_ks(alpha, vals, counts, xmin):
    n = counts.sum()
    emp = np.cumsum(counts) / n
    fit = 1.0 - special.zeta(alpha, vals + 1) / special.zeta(alpha, xmin)
    return float(np.max(np.abs(emp - fit)))


def _fit_lognormal(vals, counts, xmin):
    n = counts.sum()
    lx = np.log(vals + 0.5)
    mu0 = np.dot(counts, lx) / n
    sd0 = math.sqrt(max(np.dot(counts, (lx - mu0) ** 2) / n, 1e-4))

    def nll(theta):
        mu, log_sigma = theta
        sigma = math.exp(log_sigma)
        if not (math.isfinite(mu) and 1e-8 < sigma < 1e8):
            return np.inf
        lo = _log_sf(LOGNORMAL, {"mu": mu, "sigma": sigma}, vals)
        hi = _log_sf(LOGNORMAL, {"mu": mu, "sigma": sigma}, vals + 1)
        base = _log_sf(LOGNORMAL, {"mu": mu, "sigma": sigma}, xmin)
        ll = np.dot(counts, lo + _log1mexp(hi - lo)) - n * base
        return -ll if np.isfinite(ll) else np.inf

    # On power-law-like data the likelihood keeps rising as mu -> -inf along a
    # ridge, so there is no interior maximum. Both searches stay in this box.
    box = [(mu0 - 200.0, mu0 + 50.0), (-10.0, 6.0)]
    x0 = np.array([mu0, math.log(sd0)])
    first = optimize.minimize(nll, x0, method="L-BFGS-B", bounds=box,
                              options={"ftol": 1e-14, "gtol": 1e-9, "maxiter": 2000})
    start = first.x if np.isfinite(first.fun) and first.fun <= nll(x0) else x0
    # fatol is absolute; scale it with the sample so it stays above rounding noise
    best = optimize.minimize(nll, start, method="Nelder-Mead", bounds=box,
                             options={"xatol": 1e-8, "fatol": 1e-12 * max(n, 100),
                                      "maxiter": 4000, "maxfev": 8000})
    if first.fun < best.fun:
        best = first
    if not np.isfinite(best.fun) or (not best.success and not first.success):
        raise ConvergenceError("lognormal fit did not converge",
                               {"message": best.message, "nfev": best.nfev, "x": best.x.tolist()})
    return {"mu": float(best.x[0]), "sigma": float(math.exp(best.x[1]))}


def _fit_stretched(vals, counts, xmin):
    n = counts.sum()
    log_vals, log_next = np.log(vals), np.log(vals + 1)
    log_xmin = math.log(xmin)

    # optimise over log_c = beta * log(lam); (lam x)**beta = exp(log_c + beta log x)
    def nll(log_c, beta):
        lo = -np.exp(log_c + beta * log_vals)
        hi = -np.exp(log_c + beta * log_next)
        ll = np.dot(counts, lo + _log1mexp(hi - lo)) + n * math.exp(log_c + beta * log_xmin)
        return -ll if np.isfinite(ll) else np.inf

    def profile(beta):
        # continuous-data closed form for lam**beta seeds the bracket
        denom = np.dot(counts, np.exp(beta * log_vals) - math.exp(beta * log_xmin))
        c = math.log(n / denom) if denom > 0 else -math.log(vals.mean())
        res = optimize.minimize_scalar(lambda t: nll(t, beta), bounds=(c - 8.0, c + 8.0),
                                       method="bounded", options={"xatol": 1e-10, "maxiter": 500})
        return res.fun, res.x, res

    outer = optimize.minimize_scalar(lambda b: profile(b)[0], bounds=BETA_BOUNDS,
                                     method="bounded", options={"xatol": 1e-9, "maxiter": 500})
    if not outer.success:
        raise ConvergenceError("stretched-exponential beta search failed",
                               {"message": outer.message, "nfev": outer.nfev})
    best = None
    for beta in (float(outer.x), BETA_BOUNDS[1]):
        f, log_c, inner = profile(beta)
        if not inner.success:
            raise ConvergenceError("stretched-exponential lambda search failed",
                                   {"beta": beta, "message": inner.message})
        if best is None or f < best[0]:
            best = (f, log_c, beta)
    lam = math.exp(best[1] / best[2])
    if not math.isfinite(lam):
        raise ConvergenceError("stretched-exponential scale overflowed",
                               {"beta": best[2], "log_lam_beta": best[1]})
    return {"lam": lam, "beta": best[2]}


_FITTERS = {
    EXPONENTIAL: _fit_exponential,
    LOGNORMAL: _fit_lognormal,
    STRETCHED_EXPONENTIAL: _fit_stretched,
    POWERLAW: _fit_powerlaw_fixed,
}


def _fit_on(sample: _Sample, kind, xmin):
    vals, counts = sample.tail(xmin)
    if len(vals) < 2:
        raise DegenerateFitError(f"fewer than two distinct values at or above xmin={xmin}")
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        params = _FITTERS[kind](vals, counts, xmin)
    model = CandidateModel(kind, params, xmin=int(xmin))
    return replace(model, loglikelihood=_grouped_loglik(model, vals, counts),
                   n=int(counts.sum()))


def _select_xmin(sample: _Sample, min_tail=MIN_TAIL):
    """Power-law fit with xmin minimising the KS distance (Clauset et al.)."""
    n = len(sample.raw)
    need = min(min_tail, n)
    tail_sizes = np.cumsum(sample.counts[::-1])[::-1]
    cands = sample.values[tail_sizes >= need]
    if len(cands) == 0:
        cands = sample.values[:1]
    best = None
    for xmin in cands:
        vals, counts = sample.tail(xmin)
        if len(vals) < 2:
            continue
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            params = _fit_powerlaw_fixed(vals, counts, xmin)
        d = _powerlaw_ks(params["alpha"], vals, counts, xmin)
        if best is None or d < best[0]:
            best = (d, int(xmin), params)
    d, xmin, params = best
    vals, counts = sample.tail(xmin)
    model = CandidateModel(POWERLAW, params, xmin=xmin, ks_distance=d)
    return replace(model, loglikelihood=_grouped_loglik(model, vals, counts),
                   n=int(counts.sum()))


def fit_model(degrees, kind, xmin=None, min_tail=MIN_TAIL) -> CandidateModel:
    """Maximum-likelihood fit of one family.

    For ``powerlaw`` with ``xmin=None`` the lower cutoff is chosen by
    minimising the Kolmogorov-Smirnov distance over observed values that
    leave at least ``min_tail`` points in the tail. Other families default
    to ``xmin=1``.

    Raises
    ------
    DegenerateFitError
        All observations (at or above ``xmin``) are equal.
    ConvergenceError
        The numerical optimiser failed; ``diagnostics`` holds details.
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    sample = _Sample(degrees)
    if kind == POWERLAW and xmin is None:
        return _select_xmin(sample, min_tail)
    return _fit_on(sample, kind, 1 if xmin is None else int(xmin))


@dataclass(frozen=True)
class Comparison:
    """Log-likelihood ratio test of model ``a`` against model ``b``.

    ``R > 0`` favours ``a``. ``xmin`` is the shared support both were
    evaluated on; ``n`` the number of observations there.
    """

    a: str
    b: str
    R: float
    p: float
    xmin: int
    n: int

    def winner(self, significance=DEFAULT_SIGNIFICANCE):
        if self.p >= significance or self.R == 0:
            return None
        return self.a if self.R > 0 else self.b

    def as_dict(self):
        return dict(self.__dict__)


def compare_models(degrees, a: CandidateModel, b: CandidateModel) -> tuple[float, float]:
    """Normalised log-likelihood ratio test; returns ``(R, p)``.

    Both models are evaluated on observations ``>= max(a.xmin, b.xmin)``,
    each conditioned on that support. ``p`` is the two-sided normal
    approximation ``erfc(|R| / (sigma * sqrt(2 n)))``.
    """
    c = _compare(np.asarray(degrees), a, b)
    return c.R, c.p


def _compare(x, a, b, a_name=None, b_name=None):
    xmin = max(a.xmin, b.xmin)
    tail = x[x >= xmin].astype(float)
    if tail.size == 0:
        raise InvalidComparisonError(f"no observations at or above xmin={xmin}")
    d = a.logpmf(tail, xmin) - b.logpmf(tail, xmin)
    R = float(np.sum(d))
    sigma = float(np.std(d))
    n = tail.size
    if sigma == 0 or not math.isfinite(sigma):
        p = 1.0
    else:
        p = float(special.erfc(abs(R) / (sigma * math.sqrt(2 * n))))
    return Comparison(a_name or a.kind, b_name or b.kind, R, p, int(xmin), int(n))


@dataclass(frozen=True)
class FitResult:
    models: dict
    comparisons: list
    best: str
    inconclusive: bool
    significance: float = DEFAULT_SIGNIFICANCE
    wins: dict = field(default_factory=dict)

    def comparison(self, a, b) -> Comparison:
        for c in self.comparisons:
            if (c.a, c.b) == (a, b):
                return c
            if (c.a, c.b) == (b, a):
                return Comparison(a, b, -c.R, c.p, c.xmin, c.n)
        raise KeyError((a, b))

    def as_dict(self):
        return {
            "best": self.best,
            "inconclusive": self.inconclusive,
            "significance": self.significance,
            "models": {k: m.as_dict() for k, m in self.models.items()},
            "comparisons": [c.as_dict() for c in self.comparisons],
            "wins": dict(self.wins),
        }


def best_fit(degrees, significance=DEFAULT_SIGNIFICANCE, min_tail=MIN_TAIL,
             min_conclusive=MIN_CONCLUSIVE) -> FitResult:
    """Fit all four families and pick the best by pairwise LLR tests.

    A comparison that involves the power law is run on the power-law tail,
    with the other family refitted there. The winner is chosen among models
    that lose no significant comparison: most significant wins first, then
    fewer parameters; a stretched exponential gives way to the plain
    exponential when the latter is also unbeaten. Without any significant
    comparison, or when every model loses one, the result is flagged
    ``inconclusive`` and the model with the highest log-likelihood on the
    shared tail is reported. Samples smaller than ``min_conclusive`` are
    always flagged: the normal approximation behind the p-values is not
    trustworthy there, so the verdict is only indicative.
    """
    sample = _Sample(degrees)
    models = {k: (_select_xmin(sample, min_tail) if k == POWERLAW else _fit_on(sample, k, 1))
              for k in MODEL_KINDS}

    refits = {}

    def on_support(kind, xmin):
        m = models[kind]
        if m.xmin >= xmin:
            return m
        key = (kind, xmin)
        if key not in refits:
            try:
                refits[key] = _fit_on(sample, kind, xmin)
            except DegenerateFitError:
                refits[key] = m
        return refits[key]

    comparisons = []
    for a, b in combinations(MODEL_KINDS, 2):
        xmin = max(models[a].xmin, models[b].xmin)
        comparisons.append(_compare(sample.raw, on_support(a, xmin), on_support(b, xmin), a, b))

    wins = {k: 0 for k in MODEL_KINDS}
    lost = set()
    for c in comparisons:
        w = c.winner(significance)
        if w is not None:
            wins[w] += 1
            lost.add(c.b if w == c.a else c.a)

    undefeated = [k for k in MODEL_KINDS if k not in lost]
    if any(wins.values()) and undefeated:
        best = min(undefeated, key=lambda k: (-wins[k], N_PARAMS[k], MODEL_KINDS.index(k)))
        # a larger model never fits worse than its special case; keep the
        # special case unless it was significantly beaten
        if NESTED.get(best) in undefeated:
            best = NESTED[best]
        inconclusive = False
    else:
        shared = max(m.xmin for m in models.values())
        vals, counts = sample.tail(shared)
        ll = {k: _grouped_loglik(on_support(k, shared), vals, counts) for k in MODEL_KINDS}
        best = max(MODEL_KINDS, key=lambda k: ll[k])
        inconclusive = True
    if len(sample.raw) < min_conclusive:
        inconclusive = True
    return FitResult(models, comparisons, best, inconclusive, significance, wins)
