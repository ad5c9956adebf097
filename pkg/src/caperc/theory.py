"""Closed-form predictors for subcritical tree counts, black-vertex thresholds and regimes.

Everything with extreme magnitudes is evaluated in log space.  Functions that
can underflow come in pairs: ``log_*`` returns the natural log and the plain
version returns ``exp`` of it (``0.0`` on underflow).
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from .model import ColorSet, ModelParams


class ValidityWarning(UserWarning):
    """Inputs lie outside the asymptotic window where a predictor is meaningful."""


def rate_I(t: float) -> float:
    """``t - 1 - log t``: zero at ``t = 1`` and positive elsewhere."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    return t - 1.0 - math.log(t)


def _check_tree_args(n: int, lam: float, s: int) -> None:
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    if not 0 < lam < n:
        raise ValueError(f"need 0 < lambda < n, got {lam}")


def log_expected_tree_count(n: int, lam: float, s: int) -> float:
    """Log of the exact expected number of tree components of size ``s`` in ``G(n, lam/n)``.

    ``C(n,s) s^(s-2) p^(s-1) (1-p)^(s(n-s) + (s-1)(s-2)/2)`` with ``p = lam/n``:
    choose the vertex set, one of Cayley's ``s^(s-2)`` spanning trees, require
    its ``s-1`` edges, and forbid every edge leaving the set or closing a cycle.
    """
    _check_tree_args(n, lam, s)
    p = lam / n
    absent = s * (n - s) + (s - 1) * (s - 2) / 2
    return (
        math.lgamma(n + 1)
        - math.lgamma(s + 1)
        - math.lgamma(n - s + 1)
        + (s - 2) * math.log(s)
        + (s - 1) * math.log(p)
        + absent * math.log1p(-p)
    )


def expected_tree_count(n: int, lam: float, s: int) -> float:
    return math.exp(log_expected_tree_count(n, lam, s))


def log_asymptotic_tree_count(n: float, lam: float, s: int) -> float:
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    return math.log(n) - rate_I(lam) * s - math.log(lam) - 0.5 * math.log(2 * math.pi * s**5)


def asymptotic_tree_count(n: float, lam: float, s: int) -> float:
    """Large-``s`` form ``n exp(-I(lam) s) / (lam sqrt(2 pi s^5))``."""
    return math.exp(log_asymptotic_tree_count(n, lam, s))


def ell_cutoff(n: float, lam: float, omega: float = 1.0) -> float:
    """Tree-size cutoff ``(log n - 2.5 log log n) / I(lam) - omega``.

    Below the cutoff tree counts concentrate around their means; above
    ``cutoff + 2 omega`` no trees survive.
    """
    if n < 3:
        raise ValueError(f"need n >= 3 so that log log n is defined, got {n}")
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if omega < 0:
        raise ValueError(f"omega must be non-negative, got {omega}")
    log_n = math.log(n)
    return (log_n - 2.5 * math.log(log_n)) / rate_I(lam) - omega


def m0_threshold(n: float, q: float) -> float:
    """``log n / (2 log(1/q))``."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    return math.log(n) / (2 * math.log(1 / q))


def s1_peak(M: float, q: float, lam: float) -> float:
    """Component size ``M / (1 - (1-q) exp(-I(lam)))`` dominating the count of
    components with at least ``M`` black vertices."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    return M / (1 - (1 - q) * math.exp(-rate_I(lam)))


def black_threshold_prediction(n: float, q: float) -> float:
    """Limit law for the largest black count: ``log n / log(1/q)``."""
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    return math.log(n) / math.log(1 / q)


def chernoff_bound(mu: float, delta: float) -> float:
    """Upper bound ``2 exp(-delta^2 mu / 3)`` on ``P(|X - mu| >= delta mu)`` for binomial ``X``."""
    if mu < 0:
        raise ValueError(f"mu must be non-negative, got {mu}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return 2 * math.exp(-delta * delta * mu / 3)


def giant_validity_warnings(n: float, lam: float) -> list[str]:
    eps = lam - 1
    lo = 5 * n ** (-1 / 3)
    if not lo <= eps <= 0.2:
        return [f"lambda-1={eps:g} outside barely-supercritical window [{lo:g}, 0.2] for n={n:g}"]
    return []


def giant_size_estimate(n: float, lam: float) -> float:
    """Largest component of ``G(n, lam/n)`` for ``lam`` slightly above 1: ``2 (lam - 1) n``."""
    if not lam > 1:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    for msg in giant_validity_warnings(n, lam):
        warnings.warn(msg, ValidityWarning, stacklevel=2)
    return 2 * (lam - 1) * n


def lambda_I_star(params: ModelParams, colors: ColorSet) -> float:
    """Total intensity left after deleting the colors in ``colors``."""
    if colors.k != params.k:
        raise ValueError(f"color set is over {colors.k} colors, params have {params.k}")
    return params.Lambda - sum(params.lambdas[c - 1] for c in colors.members)


# ---------------------------------------------------------------------------
# regimes


class Regime(enum.Enum):
    SUPERCRITICAL = "supercritical"
    INTERMEDIATE = "intermediate"
    SUBCRITICAL = "subcritical"
    CRITICAL_WINDOW = "critical-window"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class RegimeLabel:
    kind: Regime
    lambda_star_1: float
    lambda_star_km1: float
    lambda_star_k: float
    zeta: float | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "zeta": self.zeta,
            "lambda_star_1": self.lambda_star_1,
            "lambda_star_km1": self.lambda_star_km1,
            "lambda_star_k": self.lambda_star_k,
        }


def classify_regime(params: ModelParams, window_tolerance: float = 1e-6) -> RegimeLabel:
    """Phase of the largest CA-component, from the smallest, second largest and
    largest color-deleted intensities.

    The critical window (``|lambda*_k - 1| <= window_tolerance`` with
    ``lambda*_{k-1} < 1``) is tested right after the supercritical case so a
    near-critical ``lambda*_k`` is not swallowed by the neighbouring regimes.
    ``lambda*_{k-1} >= 1 >= lambda*_1`` is left unclassified.
    """
    ls = params.lambda_star
    a, b, c = ls[0], ls[-2], ls[-1]
    if a > 1:
        kind, zeta = Regime.SUPERCRITICAL, None
    elif abs(c - 1) <= window_tolerance and b < 1:
        kind, zeta = Regime.CRITICAL_WINDOW, c - 1
    elif c > 1 > b:
        kind, zeta = Regime.INTERMEDIATE, None
    elif c < 1:
        kind, zeta = Regime.SUBCRITICAL, None
    else:
        kind, zeta = Regime.UNCLASSIFIED, None
    return RegimeLabel(kind, a, b, c, zeta)


def critical_window_label(params: ModelParams) -> RegimeLabel:
    """Label ``params`` as critical with ``zeta = lambda*_k - 1``, whatever its size.

    Used when a caller builds ``zeta(n) -> 0`` explicitly and only the
    hypothesis ``lambda*_{k-1} < 1`` needs checking.
    """
    ls = params.lambda_star
    if not ls[-2] < 1:
        raise ValueError(f"critical window needs lambda*_(k-1) < 1, got {ls[-2]}")
    return RegimeLabel(Regime.CRITICAL_WINDOW, ls[0], ls[-2], ls[-1], ls[-1] - 1)


@dataclass(frozen=True)
class ScalePrediction:
    """Predicted order of the largest CA-component.

    ``value`` is the full prediction when ``constant_known``; otherwise it is
    the scale (``n`` or ``log n``) multiplying an unknown constant.
    """

    kind: str  # "linear" | "logarithmic" | "bounded" | "critical-log-ratio" | "tight"
    value: float | None
    constant_known: bool


def predicted_max_ca_scale(label: RegimeLabel, n: float, k: int | None = None) -> ScalePrediction:
    if label.kind is Regime.SUPERCRITICAL:
        return ScalePrediction("linear", float(n), False)
    if label.kind is Regime.INTERMEDIATE:
        return ScalePrediction("logarithmic", math.log(n), False)
    if label.kind is Regime.SUBCRITICAL:
        if k is None:
            raise ValueError("the subcritical bound needs the color count k")
        return ScalePrediction("bounded", float(k), True)
    if label.kind is Regime.CRITICAL_WINDOW:
        zeta = label.zeta
        if zeta is None or zeta <= 0:
            return ScalePrediction("tight", None, False)
        if zeta >= 1:
            raise ValueError(f"zeta={zeta} is not small; the critical-window ratio needs 0 < zeta < 1")
        return ScalePrediction("critical-log-ratio", math.log(n) / math.log(1 / zeta), True)
    raise ValueError("no prediction for an unclassified regime")
