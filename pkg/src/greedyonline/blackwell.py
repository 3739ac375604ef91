"""Full-information approachability of the positive orthant.

The engine follows the online-linear-optimization route: losses are the
negated vector payoffs, the decision set is K = (negative orthant) n (unit
l2 ball), iterates come from follow-the-regularized-leader with an lq
regularizer, and a halfspace response oracle maps each OLO iterate w to a
player action theta with <w, p(theta, y)> <= 0 for every adversary action y.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog

from .errors import SaddleValuePositive

logger = logging.getLogger(__name__)

FTRL_TOL = 1e-8
FTRL_MAX_ITERS = 200
SADDLE_TOL = 1e-6


def q_for_dimension(d: int) -> float:
    """Regularizer exponent: ln d / (ln d - 1), clamped into (1, 2].

    The formula degenerates for small d (it exceeds 2 whenever ln d < 2),
    where the sqrt(d)-vs-sqrt(ln d) distinction is immaterial anyway.
    """
    if d < 2:
        return 2.0
    ln_d = math.log(d)
    if ln_d <= 1.5:
        return 2.0
    return min(2.0, ln_d / (ln_d - 1.0))


def strong_convexity(d: int) -> float:
    """Strong-convexity modulus of the lq regularizer w.r.t. the l1 norm."""
    if d < 2:
        return 1.0
    return 1.0 / (3.0 * math.log(d))


def learning_rate(d: int, D_p: float, horizon: int) -> float:
    """Known-horizon FTRL rate sqrt(2*B*mu) / (D_p * sqrt(T)), B = 1."""
    mu = strong_convexity(d)
    return math.sqrt(2.0 * mu) / (D_p * math.sqrt(max(1, horizon)))


def project_K(x: np.ndarray) -> np.ndarray:
    """Exact l2 projection onto (negative orthant) n (unit ball).

    Clamp-then-scale: componentwise min with zero, then rescale onto the
    unit sphere if the clamped vector is too long.  Exact because the
    negative orthant is a convex cone.
    """
    y = np.minimum(x, 0.0)
    nrm2 = float(y @ y)
    if nrm2 > 1.0:
        y = y / nrm2**0.5
    return y


@dataclass
class OloState:
    """Follow-the-regularized-leader state for one orthant game."""

    d: int
    q_exponent: float
    eta: float
    D_p: float
    cum_loss: np.ndarray
    round: int = 0
    nonconverged: int = 0

    @classmethod
    def create(cls, d: int, D_p: float, horizon: int) -> "OloState":
        return cls(
            d=d,
            q_exponent=q_for_dimension(d),
            eta=learning_rate(d, D_p, horizon),
            D_p=D_p,
            cum_loss=np.zeros(d),
        )


def _objective(w: np.ndarray, cum_loss: np.ndarray, q: float, eta: float) -> float:
    nq = float((np.abs(w) ** q).sum()) ** (1.0 / q)
    return float(cum_loss @ w) + 0.5 * nq * nq / eta


def _reg_gradient(w: np.ndarray, q: float) -> np.ndarray:
    # grad of 0.5*||w||_q^2 = ||w||_q^(2-q) * sign(w)*|w|^(q-1); zero at w=0.
    aw = np.abs(w)
    nrm = float((aw**q).sum()) ** (1.0 / q)
    if nrm < 1e-300:
        return np.zeros_like(w)
    return (nrm ** (2.0 - q)) * np.sign(w) * aw ** (q - 1.0)


def _cone_argmin(c: np.ndarray, q: float, eta: float) -> np.ndarray:
    """Closed-form argmin over the negative orthant alone (ball ignored):
    only positive-loss coordinates activate, with |w_j| proportional to
    (eta * c_j)^(1/(q-1))."""
    g = np.maximum(c, 0.0)
    if not g.any():
        return np.zeros_like(c)
    u = (eta * g) ** (1.0 / (q - 1.0))
    nq = float((u**q).sum()) ** (1.0 / q)
    return -(nq ** (q - 2.0)) * u


def ftrl_next(state: OloState, warm_start: Optional[np.ndarray] = None) -> np.ndarray:
    """argmin over K of <cum_loss, w> + R(w)/eta with R(w) = 0.5*||w||_q^2.

    For q = 2 the minimizer is the projection of -eta*cum_loss onto K.  For
    q < 2 it is found by projected gradient descent with backtracking, run
    to objective-decrease tolerance ``FTRL_TOL`` or ``FTRL_MAX_ITERS``
    iterations; on a stall the best iterate is returned and the event is
    logged.
    """
    q, eta, c = state.q_exponent, state.eta, state.cum_loss
    if q == 2.0:
        return project_K(-eta * c)

    w = project_K(_cone_argmin(c, q, eta))
    f_w = _objective(w, c, q, eta)
    if warm_start is not None:
        w_alt = project_K(np.array(warm_start, dtype=float))
        f_alt = _objective(w_alt, c, q, eta)
        if f_alt < f_w:
            w, f_w = w_alt, f_alt
    scale = max(1.0, abs(f_w))  # decrease tolerance is relative to the scale
    step = 1.0 / max(1.0, float(np.sqrt(c @ c)))
    g = c + _reg_gradient(w, q) / eta
    converged = False
    for _ in range(FTRL_MAX_ITERS):
        improved = False
        for _ in range(40):
            w_new = project_K(w - step * g)
            f_new = _objective(w_new, c, q, eta)
            if f_new <= f_w:
                improved = True
                break
            step *= 0.5
        if not improved:
            converged = True
            break
        decrease = f_w - f_new
        g_new = c + _reg_gradient(w_new, q) / eta
        dw = w_new - w
        dg = g_new - g
        curv = float(dw @ dg)
        if curv > 1e-300:  # Barzilai-Borwein step for the next iteration
            step = float(dw @ dw) / curv
        w, f_w, g = w_new, f_new, g_new
        if decrease <= FTRL_TOL * scale:
            converged = True
            break
    if not converged:
        state.nonconverged += 1
        logger.warning(
            "ftrl_next: inner solver stalled above tolerance after %d iterations",
            FTRL_MAX_ITERS,
        )
    return w


def proportional_response(w: np.ndarray) -> np.ndarray:
    """Halfspace response for pure-form payoffs p(theta, y) = (theta.y)1 - y.

    Normalizing w (all coordinates nonpositive on K) gives <w, p(theta, y)> = 0
    for every y.  Degenerate w falls back to uniform.
    """
    total = float(w.sum())
    if total < -1e-12:
        return w / total
    return np.full(w.shape, 1.0 / w.size)


class MarginalPolytope:
    """Relaxation A_m of the (lower, upper) marginal pairs reachable by
    submodular lattice functions: box [-1,1]^{2m}, alpha_1 = 0, beta_m = 0,
    and increments of alpha dominating increments of beta.

    Realizable pairs form a subset, so a response certified against A_m is
    valid against every actual adversary action.
    """

    def __init__(self, m: int):
        self.m = m
        if m >= 2:
            self._dual = self._build_dual_matrices(m)

    @staticmethod
    def _build_dual_matrices(m: int):
        # Inner problem variables x = (alpha_2..alpha_m, beta_1..beta_{m-1}).
        nx = 2 * (m - 1)

        def ax(a):  # alpha_a, a in 2..m
            return a - 2

        def bx(b):  # beta_b, b in 1..m-1
            return (m - 1) + (b - 1)

        rows = []
        # domination rows: -(alpha_{k+1} - alpha_k - beta_{k+1} + beta_k) <= 0
        for k in range(1, m):
            r = np.zeros(nx)
            r[ax(k + 1)] -= 1.0
            if k >= 2:
                r[ax(k)] += 1.0
            if k + 1 <= m - 1:
                r[bx(k + 1)] += 1.0
            r[bx(k)] -= 1.0
            rows.append((r, 0.0))
        for i in range(nx):  # box
            r = np.zeros(nx)
            r[i] = 1.0
            rows.append((r, 1.0))
            r2 = np.zeros(nx)
            r2[i] = -1.0
            rows.append((r2, 1.0))
        C = np.array([r for r, _ in rows])
        h = np.array([b for _, b in rows])
        return C, h

    def coefficient_matrix(self, u: np.ndarray) -> np.ndarray:
        """M with g = M theta, where g are the inner objective coefficients on
        x = (alpha_2.., beta_..) of G(theta, alpha, beta) =
        sum_j u_j E_{k~theta}[zeta(rho_j, rho_k) - alpha_k/2 - beta_k/2]."""
        m = self.m
        nx = 2 * (m - 1)
        M = np.zeros((nx, m))
        U_above = np.concatenate([np.cumsum(u[::-1])[::-1][1:], [0.0]])  # sum_{j>a} u_j
        U_below = np.concatenate([[0.0], np.cumsum(u)[:-1]])  # sum_{j<b} u_j
        for a in range(2, m + 1):  # coefficient of alpha_a
            row = a - 2
            M[row, : a - 1] += u[a - 1]  # u_a * 1{k < a}
            M[row, a - 1] -= U_above[a - 1] + 0.5
        for b in range(1, m):  # coefficient of beta_b
            row = (m - 1) + (b - 1)
            M[row, b:] += u[b - 1]  # u_b * 1{k > b}
            M[row, b - 1] -= U_below[b - 1] + 0.5
        return M

    def inner_max(self, u: np.ndarray, theta: np.ndarray) -> float:
        """max over A_m of G(theta, alpha, beta) for fixed theta (an LP)."""
        if self.m == 1:
            return 0.0
        g = self.coefficient_matrix(u) @ theta
        C, h = self._dual
        res = linprog(-g, A_ub=C, b_ub=h, bounds=[(None, None)] * g.size,
                      method="highs")
        if not res.success:  # pragma: no cover - bounded box LP
            raise RuntimeError(f"inner LP failed: {res.message}")
        return float(-res.fun)


def saddle_response(w: np.ndarray, polytope: MarginalPolytope) -> np.ndarray:
    """Halfspace response for the bi-greedy payoff, certified against A_m.

    Solves min over theta in the simplex of the worst-case weighted payoff
    shortfall over A_m, as one linear program via duality of the inner
    maximization.  Raises :class:`SaddleValuePositive` if the certified value
    exceeds ``SADDLE_TOL``.
    """
    m = polytope.m
    total = float(w.sum())
    if m == 1:
        return np.ones(1)
    if total >= -1e-12:
        return np.full(m, 1.0 / m)
    u = w / total

    if m == 2:
        theta, val = _saddle_m2(u)
    else:
        theta, val = _saddle_lp(u, polytope)
    if val > SADDLE_TOL:
        raise SaddleValuePositive(f"certified saddle value {val:.3e} > {SADDLE_TOL}")
    return theta


# Vertices of A_2 in (alpha_2, beta_1) coordinates: the triangle cut from the
# box by alpha_2 + beta_1 >= 0.
_A2_VERTICES = ((1.0, -1.0), (1.0, 1.0), (-1.0, 1.0))


def _saddle_m2(u: np.ndarray):
    # G(theta, x) = c2*alpha_2 + d1*beta_1 with theta = (s, 1-s):
    #   c2 = u2*s - (1-s)/2,  d1 = u1*(1-s) - s/2; both linear in s.
    def val_at(s: float) -> float:
        c2 = u[1] * s - 0.5 * (1.0 - s)
        d1 = u[0] * (1.0 - s) - 0.5 * s
        return max(c2 * a + d1 * b for a, b in _A2_VERTICES)

    # max of linear functions of s: minimize over endpoint/crossing candidates.
    lines = []
    for a, b in _A2_VERTICES:
        slope = a * (u[1] + 0.5) + b * (-u[0] - 0.5)
        icpt = a * (-0.5) + b * u[0]
        lines.append((slope, icpt))
    cands = [0.0, 1.0]
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            ds = lines[i][0] - lines[j][0]
            if abs(ds) > 1e-15:
                s = (lines[j][1] - lines[i][1]) / ds
                if 0.0 < s < 1.0:
                    cands.append(s)
    best_s = min(cands, key=val_at)
    return np.array([best_s, 1.0 - best_s]), val_at(best_s)


def _saddle_lp(u: np.ndarray, polytope: MarginalPolytope):
    # Joint LP over (theta, dual y): min h.y  s.t.  C^T y = M theta, y >= 0,
    # theta in the simplex.  Its optimum equals min_theta max_{A_m} G.
    m = polytope.m
    C, h = polytope._dual
    M = polytope.coefficient_matrix(u)
    n_y = C.shape[0]
    nx = C.shape[1]
    cost = np.concatenate([np.zeros(m), h])
    A_eq = np.zeros((nx + 1, m + n_y))
    A_eq[:nx, :m] = -M
    A_eq[:nx, m:] = C.T
    A_eq[nx, :m] = 1.0
    b_eq = np.zeros(nx + 1)
    b_eq[nx] = 1.0
    bounds = [(0.0, None)] * (m + n_y)
    res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if not res.success:
        raise SaddleValuePositive(f"saddle LP failed: {res.message}")
    theta = np.maximum(res.x[:m], 0.0)
    theta = theta / theta.sum()
    return theta, float(res.fun)


@dataclass
class BlackwellState:
    """Per-subproblem learner: OLO core plus a halfspace response oracle."""

    olo: OloState
    respond: Callable[[np.ndarray], np.ndarray]
    current_w: np.ndarray
    current_theta: np.ndarray
    anytime: bool = False
    horizon: int = 1

    @classmethod
    def create(
        cls,
        d: int,
        D_p: float,
        horizon: int,
        respond: Callable[[np.ndarray], np.ndarray] = proportional_response,
        anytime: bool = False,
    ) -> "BlackwellState":
        olo = OloState.create(d, D_p, horizon)
        state = cls(
            olo=olo,
            respond=respond,
            current_w=np.zeros(d),
            current_theta=np.zeros(d),
            anytime=anytime,
            horizon=horizon,
        )
        state.current_theta = algb_step(state, None)
        return state


def algb_step(state: BlackwellState, realized_payoff: Optional[np.ndarray]) -> np.ndarray:
    """Advance the learner one round and return its next action.

    Feeds the negated payoff as an OLO loss, recomputes the FTRL iterate, and
    maps it through the response oracle.  The first query carries no payoff.
    """
    olo = state.olo
    if realized_payoff is not None:
        olo.cum_loss -= realized_payoff
        olo.round += 1
        if state.anytime:
            olo.eta = learning_rate(olo.d, olo.D_p, max(1, olo.round))
    w = ftrl_next(olo, warm_start=state.current_w)
    state.current_w = w
    theta = state.respond(w)
    state.current_theta = theta
    return theta


@dataclass
class HedgeState:
    """Multiplicative-weights cross-check engine.

    Only meaningful for pure-form payoffs, where approaching the positive
    orthant coincides with external-regret minimization over arms.
    """

    m: int
    rate: float
    cum_rewards: np.ndarray

    @classmethod
    def create(cls, m: int, horizon: int) -> "HedgeState":
        rate = math.sqrt(8.0 * math.log(m) / max(1, horizon)) if m >= 2 else 0.0
        return cls(m=m, rate=rate, cum_rewards=np.zeros(m))

    @property
    def current_theta(self) -> np.ndarray:
        s = self.rate * self.cum_rewards
        s = s - s.max()
        e = np.exp(s)
        return e / e.sum()


def hedge_step(state: HedgeState, reward_vector: np.ndarray) -> np.ndarray:
    """Multiplicative-weights update; returns the post-update action."""
    state.cum_rewards += reward_vector
    return state.current_theta
