"""
Closed-form MC dropout moments for the single-layer linear network
==================================================================

The model is f = sum_k d_k w_k with d_k ~ Bernoulli(p), p = 1 - p_d,
trained with MSE against targets of mean y_bar. With all K weights equal
to w:

- E[f] = w K p,  Var[f] = w^2 K p (1 - p)
- E[(f - y_bar)^2] = w^2 K p (K p - p + 1) - 2 y_bar w K p + y_bar^2
- the minimizer is w = y_bar / (K p - p + 1)

Nothing here depends on the number of samples or on the spread of the
targets, only on (K, p_d, y_bar).
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Tuple

from core import get_logger
from core.validation import check_positive_int, check_probability

logger = get_logger(__name__)


@dataclass(frozen=True)
class SingleLayerSpec:
    """Unit count K, drop probability p_d and target mean y_bar."""
    K: int
    p_d: float
    y_bar: float

    def __post_init__(self):
        object.__setattr__(self, 'K', check_positive_int(self.K, 'K'))
        object.__setattr__(self, 'p_d', check_probability(self.p_d, 'p_d'))
        object.__setattr__(self, 'y_bar', float(self.y_bar))

    @property
    def p(self) -> float:
        """Keep probability."""
        return 1.0 - self.p_d

    @property
    def denominator(self) -> float:
        """K p - p + 1, equal to K (1 - p_d) + p_d."""
        return self.K * self.p - self.p + 1.0


@dataclass(frozen=True)
class TheoryPrediction:
    w_opt: float
    mean_f: float
    var_f: float

    def to_dict(self) -> Dict[str, float]:
        return {'w_opt': self.w_opt, 'mean_f': self.mean_f, 'var_f': self.var_f}


def optimal_weight(spec: SingleLayerSpec) -> float:
    """Weight minimizing the expected squared error: y_bar / (K p - p + 1)."""
    return spec.y_bar / spec.denominator


def moments_for_weight(spec: SingleLayerSpec, w: float) -> Tuple[float, float]:
    """(E[f], Var[f]) of the network with all weights equal to w."""
    K, p = spec.K, spec.p
    return w * K * p, w * w * K * p * (1.0 - p)


def predict_moments(spec: SingleLayerSpec) -> TheoryPrediction:
    """Optimal weight and the output moments it produces."""
    w = optimal_weight(spec)
    mean_f, var_f = moments_for_weight(spec, w)
    return TheoryPrediction(w_opt=w, mean_f=mean_f, var_f=var_f)


def expected_mse(spec: SingleLayerSpec, w: float) -> float:
    """E[(f - y_bar)^2] at common weight w."""
    K, p, y = spec.K, spec.p, spec.y_bar
    return w * w * K * p * spec.denominator - 2.0 * y * w * K * p + y * y


def mse_derivative(spec: SingleLayerSpec, w: float) -> float:
    """d/dw of expected_mse."""
    K, p = spec.K, spec.p
    return 2.0 * w * K * p * spec.denominator - 2.0 * spec.y_bar * K * p


def theory_sweep(Ks: Iterable[int], p_ds: Iterable[float],
                 y_bar: float) -> List[Dict[str, Any]]:
    """Predictions over a (K, p_d) grid.

    ``bias`` is y_bar - E[f], the shortfall of the expected output.
    """
    rows = []
    p_ds = list(p_ds)
    for K in Ks:
        for p_d in p_ds:
            spec = SingleLayerSpec(K, p_d, y_bar)
            pred = predict_moments(spec)
            rows.append({
                'K': spec.K,
                'p_d': spec.p_d,
                'y_bar': spec.y_bar,
                'w_opt': pred.w_opt,
                'mean_f': pred.mean_f,
                'var_f': pred.var_f,
                'bias': spec.y_bar - pred.mean_f,
            })
    logger.debug(f"Computed theory sweep with {len(rows)} rows")
    return rows
