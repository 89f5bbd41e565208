"""
Kantorovich-Rubinstein (Wasserstein-1) distances between discrete measures.

On the interval W1 is the CDF integral (scipy). On the circle the primal
transport problem is solved exactly with POT's network simplex. The distance
from a measure to the convex hull of finitely many measures is a single
linear program over couplings and mixture weights, solved with HiGHS.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np
import ot
from scipy import sparse
from scipy.optimize import linprog
from scipy.stats import wasserstein_distance as cdf_wasserstein

from src.config import DEFAULTS
from src.errors import MeasureError, SolverError
from src.measures.discrete import MASS_TOL, DiscreteMeasure

if TYPE_CHECKING:
    from src.measures.sets import MeasureSet

logger = logging.getLogger(__name__)

# Above this many coupling variables the circle closed form replaces the network simplex.
LARGE_COUPLING = 4_000_000
EMD_MAX_ITER = 10_000_000
ZERO_SNAP = 1e-9


def _check_pair(mu: DiscreteMeasure, nu: DiscreteMeasure) -> None:
    if mu.space != nu.space:
        raise MeasureError(f"Measures live on different phase spaces ({mu.space} vs {nu.space})")
    for m in (mu, nu):
        if abs(float(m.weights.sum()) - 1.0) > MASS_TOL or np.any(m.weights < 0.0):
            raise MeasureError("W1 is defined for probability measures only", {"total": float(m.weights.sum())})


def _ordered(mu: DiscreteMeasure, nu: DiscreteMeasure):
    # A fixed argument order makes every distance exactly symmetric.
    key_mu = (len(mu), mu.support.tolist(), mu.weights.tolist())
    key_nu = (len(nu), nu.support.tolist(), nu.weights.tolist())
    return (mu, nu) if key_mu <= key_nu else (nu, mu)


def cost_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    """Ground costs rho(x_a, y_b) between the two supports."""
    return np.asarray(mu.space.distance(mu.support[:, None], nu.support[None, :]), dtype=float)


def transport_cost(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """
    Exact optimal transport cost with ground cost rho, on either phase space.

    Args:
        mu: first measure
        nu: second measure (same phase space)

    Returns:
        min over couplings pi of sum pi_ab rho(x_a, y_b)

    Raises:
        MeasureError: mismatched spaces or unnormalized inputs
        SolverError: the network simplex stopped before optimality
    """
    _check_pair(mu, nu)
    a, b = _ordered(mu, nu)
    if len(a) == 1 or len(b) == 1:
        return float(np.dot(a.weights, cost_matrix(a, b) @ b.weights))

    if a.space.is_circle and len(a) * len(b) > LARGE_COUPLING:
        logger.debug("Large circle coupling, using the closed form", extra={"atoms": (len(a), len(b))})
        value = ot.wasserstein_circle(a.support, b.support, a.weights, b.weights, p=1)
        return float(np.asarray(value).reshape(-1)[0])

    cost, log = ot.emd2(a.weights, b.weights, cost_matrix(a, b), numItermax=EMD_MAX_ITER, log=True)
    if log.get("warning"):
        raise SolverError(f"Network simplex did not reach optimality: {log['warning']}")
    return max(float(cost), 0.0)


def w1_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """
    Wasserstein-1 distance between two discrete probability measures.

    Interval measures use the CDF formula int |F_mu - F_nu|; circle measures
    solve the transport problem exactly.
    """
    _check_pair(mu, nu)
    if mu.space.is_circle:
        return transport_cost(mu, nu)
    return float(cdf_wasserstein(mu.support, nu.support, mu.weights, nu.weights))


def w1_matrix(P: Sequence[DiscreteMeasure], Q: Sequence[DiscreteMeasure]) -> np.ndarray:
    """All pairwise distances W[i, j] = W1(P[i], Q[j])."""
    P, Q = list(P), list(Q)
    out = np.empty((len(P), len(Q)))
    same = P is Q or (len(P) == len(Q) and all(p is q for p, q in zip(P, Q)))
    for i, p in enumerate(P):
        for j, q in enumerate(Q):
            if same and j < i:
                out[i, j] = out[j, i]
            elif same and i == j:
                out[i, j] = 0.0
            else:
                out[i, j] = w1_distance(p, q)
    return out


@dataclass(frozen=True)
class HullProjection:
    """Closest mixture of a finite family to a measure."""

    value: float
    lambdas: np.ndarray


def w1_point_to_hull(mu: DiscreteMeasure, extremes: Sequence[DiscreteMeasure]) -> HullProjection:
    """
    Distance from mu to the convex hull of `extremes`, as one joint LP.

    Variables are the coupling pi between mu and the union support Y of the
    extremes, plus the mixture weights lambda. Row marginals of pi equal mu;
    column marginals equal sum_i lambda_i nu_i; lambda lies on the simplex.

    Raises:
        MeasureError: empty family or mismatched spaces
        SolverError: HiGHS did not finish with an optimal solution
    """
    extremes = list(extremes)
    if not extremes:
        raise MeasureError("Distance to an empty set of measures is undefined")
    for nu in extremes:
        _check_pair(mu, nu)
    if len(extremes) == 1:
        return HullProjection(w1_distance(mu, extremes[0]), np.ones(1))

    y = np.unique(np.concatenate([nu.support for nu in extremes]))
    m, k, r = len(mu), y.size, len(extremes)
    mix = np.zeros((k, r))
    for i, nu in enumerate(extremes):
        mix[np.searchsorted(y, nu.support), i] = nu.weights

    costs = np.asarray(mu.space.distance(mu.support[:, None], y[None, :]), dtype=float).ravel()
    c = np.concatenate([costs, np.zeros(r)])
    rows = sparse.kron(sparse.identity(m), sparse.csr_matrix(np.ones((1, k))))
    cols = sparse.kron(sparse.csr_matrix(np.ones((1, m))), sparse.identity(k))
    a_eq = sparse.vstack(
        [
            sparse.hstack([rows, sparse.csr_matrix((m, r))]),
            sparse.hstack([cols, sparse.csr_matrix(-mix)]),
            sparse.hstack([sparse.csr_matrix((1, m * k)), sparse.csr_matrix(np.ones((1, r)))]),
        ],
        format="csr",
    )
    b_eq = np.concatenate([mu.weights, np.zeros(k), [1.0]])

    result = linprog(
        c,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": DEFAULTS.lp_tol, "dual_feasibility_tolerance": DEFAULTS.lp_tol},
    )
    if result.status != 0:
        raise SolverError(f"Hull LP failed: {result.message}", {"status": int(result.status)})

    value = float(result.fun)
    lambdas = np.clip(result.x[m * k :], 0.0, None)
    return HullProjection(0.0 if value <= ZERO_SNAP else value, lambdas / lambdas.sum())


def w1_point_to_set(mu: DiscreteMeasure, measure_set: "MeasureSet", hull: Optional[bool] = None) -> float:
    """
    Distance from a measure to a MeasureSet.

    Args:
        mu: the measure
        measure_set: nonempty MeasureSet
        hull: override the set's hull semantics (None uses the set's flag)

    Returns:
        min over extremes of W1 (finite mode), or the distance to their convex hull (hull mode)
    """
    extremes = list(measure_set.extremes)
    if not extremes:
        raise MeasureError("Distance to an empty set of measures is undefined")
    use_hull = measure_set.hull if hull is None else hull
    if use_hull:
        return w1_point_to_hull(mu, extremes).value
    value = min(w1_distance(mu, nu) for nu in extremes)
    return 0.0 if value <= ZERO_SNAP else value
