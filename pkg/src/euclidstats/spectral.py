"""Weighted transfer operators on Chebyshev collocation grids.

The operator H[f](x) = sum over inverse branches h of exp(w c(h)) |h'(x)|^s
f(h(x)) acts on polynomial interpolants at Chebyshev-Lobatto nodes mapped to
the algorithm's interval.  Branches with quotient m <= m_cap enter exactly;
the remaining tail of each arithmetic branch family is completed with an
Euler-Maclaurin expansion whose integral term is evaluated by Gauss-Jacobi
quadrature (the integrand has endpoint exponent 2s - 2 > -1 exactly when
s > 1/2, the convergence abscissa of these systems).

All spectral constants derive from the pressure log lambda(sigma, nu) and
its partial derivatives at (1, 0).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy.special import roots_jacobi

from .core import Algorithm, Digit, get_algorithm
from .costs import DigitCost, eval_cost


class DivergenceError(ValueError):
    """(sigma, nu) outside the convergence region of the weighted branch sum."""


class NonConvergenceError(RuntimeError):
    """Power iteration failed to reach the residual target."""


class InconsistencyError(RuntimeError):
    """A cross-validation between independent routes failed."""


@dataclass(frozen=True)
class OperatorConfig:
    degree: int = 40
    m_cap: int = 64
    tail_tol: float = 1e-14
    quad_points: int = 32
    power_iters: int = 400
    residual_tol: float = 1e-12
    fd_step_first: float = 1e-3
    fd_step_second: float = 1e-2

    def __post_init__(self) -> None:
        if self.degree < 8:
            raise InconsistencyError(f"degree {self.degree} below the minimum 8")
        if self.m_cap < 4:
            raise InconsistencyError(f"m_cap {self.m_cap} too small")


# ---------------------------------------------------------------------------
# polynomial function models
# ---------------------------------------------------------------------------


def chebyshev_nodes(degree: int, lo: float, hi: float) -> np.ndarray:
    k = np.arange(degree + 1)
    t = np.cos(np.pi * k / degree)
    return (lo + (hi - lo) * (t + 1.0) / 2.0)[::-1].copy()


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    # Chebyshev-Lobatto weights up to scale: (-1)^k, halved at the endpoints
    n = len(nodes) - 1
    w = (-1.0) ** np.arange(n + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def barycentric_matrix(targets: np.ndarray, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """P with P[i, j] = l_j(targets[i]) for the Lagrange basis on the nodes."""
    diff = targets[:, None] - nodes[None, :]
    hit = diff == 0.0
    diff = np.where(hit, 1.0, diff)
    ratio = weights[None, :] / diff
    P = ratio / ratio.sum(axis=1, keepdims=True)
    rows_hit = hit.any(axis=1)
    if rows_hit.any():
        P[rows_hit] = 0.0
        ii, jj = np.nonzero(hit)
        P[ii, jj] = 1.0
    return P


def differentiation_matrix(nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    n = len(nodes)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (weights[j] / weights[i]) / (nodes[i] - nodes[j])
    for i in range(n):
        D[i, i] = -D[i].sum()
    return D


def clenshaw_curtis_weights(degree: int, lo: float, hi: float) -> np.ndarray:
    """Integration weights for the Lobatto grid (exact for the interpolant)."""
    n = degree
    k = np.arange(n + 1)
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    for m in range(1, n // 2 + 1):
        factor = 2.0 if 2 * m < n else 1.0
        v -= factor * np.cos(2.0 * m * np.pi * k[1:-1] / n) / (4.0 * m * m - 1.0)
    w[1:-1] = 2.0 * v / n
    w[0] = w[-1] = 1.0 / (n * n - 1.0 + (n % 2))
    return w[::-1] * (hi - lo) / 2.0


@dataclass
class FunctionModel:
    """Polynomial interpolant stored by its values at Chebyshev-Lobatto nodes."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.weights = barycentric_weights(self.nodes)

    def __call__(self, x) -> np.ndarray | float:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = barycentric_matrix(xs, self.nodes, self.weights) @ self.values
        return out if np.ndim(x) else float(out[0])

    def derivative(self) -> "FunctionModel":
        D = differentiation_matrix(self.nodes, self.weights)
        return FunctionModel(self.nodes, D @ self.values)

    def integral(self) -> float:
        w = clenshaw_curtis_weights(len(self.nodes) - 1, self.nodes[0], self.nodes[-1])
        return float(w @ self.values)


# ---------------------------------------------------------------------------
# branch families and assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Family:
    """Arithmetic family of branches m = step*t + base, eps fixed, t >= t_start."""

    step: int
    base: int
    eps: int
    t_start: int

    def m_of(self, t: int) -> int:
        return self.step * t + self.base

    def t_of_first_m_above(self, m_cap: int) -> int:
        # smallest t with m > m_cap
        t = (m_cap - self.base) // self.step + 1
        return max(t, self.t_start)


def _families(algo: Algorithm) -> list[_Family]:
    if algo.id == "G":
        return [_Family(1, 0, 1, 1)]
    if algo.id == "K":
        return [_Family(1, 0, 1, 2), _Family(1, 0, -1, 3)]
    return [_Family(2, 1, 1, 0), _Family(2, 1, -1, 1)]


def _nu_bound(cost: DigitCost, sigma: float) -> float:
    """Real-axis convergence bound on nu for the weighted branch sum."""
    if cost.kind == "bits":
        return (2.0 * sigma - 1.0) * math.log(2.0)
    return math.inf


def _extra_branches(algo: Algorithm, cost: DigitCost, m_cap: int, nu: float) -> list[Digit]:
    """Branches above m_cap that carry a nonzero cost and must enter exactly.

    Beyond these, every tail branch has zero cost, so the tail completion
    can use a constant weight.
    """
    extra: list[Digit] = []
    if cost.kind == "indicator" and cost.m0 > m_cap:
        for eps in (1, -1):
            if algo.digit_ok(cost.m0, eps):
                extra.append(Digit(cost.m0, eps))
    if cost.kind == "table":
        for m, eps, value in cost.entries:
            if m <= m_cap:
                continue
            for e in (1, -1) if eps is None else (eps,):
                if algo.digit_ok(m, e):
                    extra.append(Digit(m, e))
    return extra


@dataclass
class AssembledOperator:
    algo_id: str
    cost_desc: str
    sigma: float
    nu: float
    matrix: np.ndarray
    nodes: np.ndarray
    bary: np.ndarray
    tail_bound: float


def _tail_sum_rows(
    family: _Family,
    t_from: int,
    sigma: float,
    weight: float,
    nodes: np.ndarray,
    bary: np.ndarray,
    D1: np.ndarray,
    D2: np.ndarray,
    D3: np.ndarray,
    quad: tuple[np.ndarray, np.ndarray],
) -> np.ndarray:
    """Euler-Maclaurin completion of sum_{t >= t_from} (a t + b + eps x)^(-2s) f(h(x)).

    Correction terms through the third derivative; the integral term becomes
    int_0^{1/tau0} y^(2s-2) f(y) dy after substituting y = 1/tau, evaluated by
    Gauss-Jacobi quadrature with endpoint exponent beta = 2s - 2.
    """
    s = sigma
    a = float(family.step)
    n = len(nodes)
    ug, wg = quad  # nodes in (0, 1), weights for int_0^1 u^beta g(u) du
    tau0 = a * t_from + family.base + family.eps * nodes  # (n,)
    out = np.zeros((n, n))
    for i in range(n):
        t0 = tau0[i]
        A = 1.0 / t0
        yq = A * ug
        Pq = barycentric_matrix(yq, nodes, bary)
        integral = (1.0 / a) * A ** (2 * s - 1) * (wg @ Pq)
        y0 = np.array([A])
        P0 = barycentric_matrix(y0, nodes, bary)
        l0 = P0.ravel()
        l1 = (P0 @ D1).ravel()
        l2 = (P0 @ D2).ravel()
        l3 = (P0 @ D3).ravel()
        F0 = t0 ** (-2 * s) * l0
        F1 = -2 * s * t0 ** (-2 * s - 1) * l0 - t0 ** (-2 * s - 2) * l1
        F3 = (
            -2 * s * (2 * s + 1) * (2 * s + 2) * t0 ** (-2 * s - 3) * l0
            - (12 * s * s + 18 * s + 6) * t0 ** (-2 * s - 4) * l1
            - (6 * s + 6) * t0 ** (-2 * s - 5) * l2
            - t0 ** (-2 * s - 6) * l3
        )
        out[i] = integral + 0.5 * F0 - (a / 12.0) * F1 + (a**3 / 720.0) * F3
    return weight * out


def assemble(
    algo: str | Algorithm,
    cost: DigitCost,
    sigma: float,
    nu: float,
    cfg: OperatorConfig = OperatorConfig(),
) -> AssembledOperator:
    """Collocation matrix of the weighted transfer operator at real (sigma, nu)."""
    alg = get_algorithm(algo)
    if sigma <= 0.5:
        raise DivergenceError(f"sigma = {sigma} at or below the convergence abscissa 1/2")
    if nu >= _nu_bound(cost, sigma):
        raise DivergenceError(f"nu = {nu} outside the convergence region for this cost")
    n = cfg.degree + 1
    nodes = chebyshev_nodes(cfg.degree, 0.0, float(alg.i_sup))
    bary = barycentric_weights(nodes)
    H = np.zeros((n, n))

    for m, eps in alg.digits(cfg.m_cap):
        weight = math.exp(nu * float(eval_cost(cost, Digit(m, eps))))
        den = m + eps * nodes
        P = barycentric_matrix(1.0 / den, nodes, bary)
        H += weight * (den ** (-2.0 * sigma))[:, None] * P
    for m, eps in _extra_branches(alg, cost, cfg.m_cap, nu):
        # the weight-1 tail below already counts these once
        weight = math.exp(nu * float(eval_cost(cost, Digit(m, eps)))) - 1.0
        den = m + eps * nodes
        P = barycentric_matrix(1.0 / den, nodes, bary)
        H += weight * (den ** (-2.0 * sigma))[:, None] * P

    D1 = differentiation_matrix(nodes, bary)
    D2 = D1 @ D1
    D3 = D2 @ D1
    beta = 2.0 * sigma - 2.0
    xg, wg = roots_jacobi(cfg.quad_points, 0.0, beta)
    ug = (xg + 1.0) / 2.0
    wq = wg * 2.0 ** (-beta - 1.0)
    quad = (ug, wq)

    tail_bound = 0.0
    for fam in _families(alg):
        t_from = fam.t_of_first_m_above(cfg.m_cap)
        m_from = fam.m_of(t_from)
        if cost.kind == "bits":
            # cost is constant on dyadic quotient blocks; complete block by block
            k = m_from.bit_length() - 1
            t_lo = t_from
            while True:
                block_hi_m = 2 ** (k + 1) - 1
                t_hi = (block_hi_m - fam.base) // fam.step + 1  # first t past the block
                w_block = math.exp(nu * (k + 1))
                rows_lo = _tail_sum_rows(fam, t_lo, sigma, w_block, nodes, bary, D1, D2, D3, quad)
                rows_hi = _tail_sum_rows(fam, t_hi, sigma, w_block, nodes, bary, D1, D2, D3, quad)
                H += rows_lo - rows_hi
                remainder = math.exp(nu * (k + 2)) * (2.0 ** (k + 1)) ** (1.0 - 2.0 * sigma)
                k += 1
                t_lo = t_hi
                if remainder < cfg.tail_tol / 4.0:
                    w_rest = math.exp(nu * (k + 1))
                    H += _tail_sum_rows(fam, t_lo, sigma, w_rest, nodes, bary, D1, D2, D3, quad)
                    tail_bound += remainder
                    break
        else:
            if cost.kind == "unit":
                weight = math.exp(nu)
            else:  # indicator beyond its quotient, or table beyond its entries
                weight = 1.0
            H += _tail_sum_rows(fam, t_from, sigma, weight, nodes, bary, D1, D2, D3, quad)
        # Euler-Maclaurin remainder scale: the next (fifth-derivative) term,
        # whose coefficient B_6/6! along with the falling powers of 2s gives
        # roughly 720/30240 * tau^(-2s-5) at the cut
        tail_bound += 0.024 * float(m_from) ** (-2.0 * sigma - 5.0)
    # the budget is set at the reference point sigma = 1; below it the tail
    # grows like m_cap^(2(1-sigma)), so relax the alarm accordingly
    allowance = 2.0 * cfg.tail_tol * (cfg.m_cap + 1.0) ** (2.0 * max(0.0, 1.0 - sigma))
    if tail_bound > allowance:
        import warnings

        warnings.warn(
            f"tail completion bound {tail_bound:.2e} exceeds the tail_tol budget "
            f"{cfg.tail_tol:.0e}; raise m_cap or loosen tail_tol",
            stacklevel=2,
        )
    return AssembledOperator(alg.id, cost.descriptor(), sigma, nu, H, nodes, bary, tail_bound)


# ---------------------------------------------------------------------------
# dominant eigenpair and pressure
# ---------------------------------------------------------------------------


@dataclass
class SpectralModel:
    algo_id: str
    cost_desc: str
    sigma: float
    nu: float
    lam: float
    eigenfunction: FunctionModel
    residual: float
    subdominant_gap_estimate: float


def dominant_eigen(
    op: AssembledOperator, cfg: OperatorConfig = OperatorConfig()
) -> tuple[float, FunctionModel, float]:
    """Dominant eigenpair by power iteration from the constant function."""
    H = op.matrix
    n = H.shape[0]
    f = np.ones(n)
    lam = 1.0
    anchor = 0
    for it in range(cfg.power_iters):
        g = H @ f
        anchor = int(np.argmax(np.abs(g)))
        lam = g[anchor] / f[anchor]
        g = g / np.abs(g[anchor])
        delta = np.max(np.abs(g - f))
        f = g
        if delta < cfg.residual_tol / 10.0 and it >= 8:
            break
    else:
        raise NonConvergenceError(
            f"power iteration did not settle in {cfg.power_iters} iterations"
        )
    residual = float(np.max(np.abs(H @ f - lam * f)) / np.max(np.abs(f)))
    if residual > 1e-10 * max(1.0, abs(lam)):
        raise NonConvergenceError(f"eigen residual {residual:.3e} above 1e-10")
    if np.min(f) <= 0:
        raise NonConvergenceError("dominant eigenfunction is not strictly positive")
    return float(lam), FunctionModel(op.nodes, f), residual


_lambda_memo: dict[tuple, float] = {}


def lambda_fn(
    algo: str | Algorithm,
    cost: DigitCost,
    sigma: float,
    nu: float,
    cfg: OperatorConfig = OperatorConfig(),
) -> float:
    """Dominant eigenvalue lambda(sigma, nu), memoized."""
    alg = get_algorithm(algo)
    key = (alg.id, cost.descriptor(), round(sigma, 14), round(nu, 14),
           cfg.degree, cfg.m_cap, cfg.quad_points)
    if key in _lambda_memo:
        return _lambda_memo[key]
    lam, _, _ = dominant_eigen(assemble(alg, cost, sigma, nu, cfg), cfg)
    _lambda_memo[key] = lam
    return lam


def spectral_model(
    algo: str | Algorithm,
    cost: DigitCost,
    sigma: float,
    nu: float,
    cfg: OperatorConfig = OperatorConfig(),
) -> SpectralModel:
    op = assemble(algo, cost, sigma, nu, cfg)
    lam, fn, res = dominant_eigen(op, cfg)
    # crude gap estimate from the tail convergence ratio of the iteration
    H = op.matrix
    g1 = H @ fn.values / lam - fn.values
    g2 = H @ (H @ fn.values) / lam**2 - fn.values
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.max(np.abs(g2)) / np.max(np.abs(g1)) if np.max(np.abs(g1)) > 0 else 0.0
    return SpectralModel(op.algo_id, op.cost_desc, sigma, nu, lam, fn, res, float(min(ratio, 1.0)))


def invariant_density(
    algo: str | Algorithm, cfg: OperatorConfig = OperatorConfig()
) -> FunctionModel:
    """Eigenfunction at (1, 0), normalized to unit integral over I."""
    op = assemble(algo, DigitCost.unit(), 1.0, 0.0, cfg)
    lam, fn, _ = dominant_eigen(op, cfg)
    mass = fn.integral()
    return FunctionModel(fn.nodes, fn.values / mass)


def weighted_derivative_average(
    algo: str | Algorithm, cost: DigitCost, cfg: OperatorConfig = OperatorConfig()
) -> float:
    """Analytic w-derivative of lambda at (1, 0).

    Differentiating the weight exp(w c) turns the operator into its
    cost-weighted variant; pairing with the fixed adjoint measure (Lebesgue)
    gives lambda'_w(1, 0) = integral of H^(c)[f_1] when f_1 has unit integral.
    """
    alg = get_algorithm(algo)
    density = invariant_density(alg, cfg)
    nodes, bary = density.nodes, density.weights
    n = len(nodes)
    Hc = np.zeros((n, n))
    explicit = list(alg.digits(cfg.m_cap)) + _extra_branches(alg, cost, cfg.m_cap, 1.0)
    for m, eps in explicit:
        c = float(eval_cost(cost, Digit(m, eps)))
        if c == 0.0:
            continue
        den = m + eps * nodes
        P = barycentric_matrix(1.0 / den, nodes, bary)
        Hc += c * (den**-2.0)[:, None] * P
    if cost.kind in ("unit", "bits"):
        # the tail still carries cost: 1 everywhere, or k+1 per dyadic block
        D1 = differentiation_matrix(nodes, bary)
        D2 = D1 @ D1
        D3 = D2 @ D1
        xg, wg = roots_jacobi(cfg.quad_points, 0.0, 0.0)
        quad = ((xg + 1.0) / 2.0, wg / 2.0)
        for fam in _families(alg):
            t_from = fam.t_of_first_m_above(cfg.m_cap)
            if cost.kind == "unit":
                Hc += _tail_sum_rows(fam, t_from, 1.0, 1.0, nodes, bary, D1, D2, D3, quad)
                continue
            k = fam.m_of(t_from).bit_length() - 1
            t_lo = t_from
            while True:
                block_hi_m = 2 ** (k + 1) - 1
                t_hi = (block_hi_m - fam.base) // fam.step + 1
                rows_lo = _tail_sum_rows(fam, t_lo, 1.0, float(k + 1), nodes, bary, D1, D2, D3, quad)
                rows_hi = _tail_sum_rows(fam, t_hi, 1.0, float(k + 1), nodes, bary, D1, D2, D3, quad)
                Hc += rows_lo - rows_hi
                remainder = (k + 2) * (2.0 ** (k + 1)) ** (-1.0)
                k += 1
                t_lo = t_hi
                if remainder < cfg.tail_tol:
                    Hc += _tail_sum_rows(fam, t_lo, 1.0, float(k + 1), nodes, bary, D1, D2, D3, quad)
                    break
    image = FunctionModel(nodes, Hc @ density.values)
    return image.integral()


PARTIAL_NAMES = ("lambda_s", "lambda_w", "lambda_ss", "lambda_ww", "lambda_sw")


def pressure_derivatives(
    algo: str | Algorithm,
    cost: DigitCost,
    cfg: OperatorConfig = OperatorConfig(),
) -> dict[str, float]:
    """First and second partials of the pressure log lambda at (1, 0).

    Central differences with one Richardson step (steps h and h/2).  The
    w-first partial is cross-validated against the exact invariant-measure
    average of the cost; disagreement signals a discretization problem.
    """
    alg = get_algorithm(algo)

    def L(s: float, w: float) -> float:
        return math.log(lambda_fn(alg, cost, s, w, cfg))

    lam00 = lambda_fn(alg, cost, 1.0, 0.0, cfg)
    if abs(lam00 - 1.0) > 1e-9:
        raise InconsistencyError(f"lambda(1, 0) = {lam00} deviates from 1 beyond 1e-9")

    def central_first(fun, h):
        d1 = (fun(h) - fun(-h)) / (2 * h)
        d2 = (fun(h / 2) - fun(-h / 2)) / h
        return (4 * d2 - d1) / 3

    def central_second(fun, h):
        f0 = fun(0.0)
        d1 = (fun(h) - 2 * f0 + fun(-h)) / (h * h)
        d2 = (fun(h / 2) - 2 * f0 + fun(-h / 2)) / (h * h / 4)
        return (4 * d2 - d1) / 3

    h1, h2 = cfg.fd_step_first, cfg.fd_step_second
    Ls = central_first(lambda e: L(1.0 + e, 0.0), h1)
    Lw_fd = central_first(lambda e: L(1.0, e), h1)
    Lss = central_second(lambda e: L(1.0 + e, 0.0), h2)
    Lww = central_second(lambda e: L(1.0, e), h2)

    def cross(h):
        return (
            L(1.0 + h, h) - L(1.0 + h, -h) - L(1.0 - h, h) + L(1.0 - h, -h)
        ) / (4 * h * h)

    Lsw = (4 * cross(h2 / 2) - cross(h2)) / 3

    # analytic route for the w-first partial (exact weight differentiation)
    Lw = weighted_derivative_average(alg, cost, cfg)
    from .realdyn import mu_hat_closed_form

    mu_hat = mu_hat_closed_form(alg, cost)
    if abs(Lw - mu_hat) > 1e-7 or abs(Lw_fd - mu_hat) > 1e-7:
        raise InconsistencyError(
            f"lambda'_w cross-validation failed: analytic {Lw}, finite-difference "
            f"{Lw_fd}, closed form {mu_hat}"
        )
    return {
        "lambda_s": Ls,
        "lambda_w": Lw,
        "lambda_w_fd": Lw_fd,
        "lambda_ss": Lss,
        "lambda_ww": Lww,
        "lambda_sw": Lsw,
        "lambda_00": lam00,
    }


@dataclass
class ConstantsBundle:
    """Growth and fluctuation constants of one (algorithm, cost) pair."""

    algo_id: str
    cost_desc: str
    lambda_s: float  # pressure s-derivative at (1, 0); minus the entropy
    lambda_w: float
    lambda_ss: float
    lambda_ww: float
    lambda_sw: float  # chi(c)
    mu: float  # 2 / |Lambda'(1)|: mean number of steps per log N
    delta2: float  # 2 Lambda''(1)/|Lambda'(1)|^3: step-count variance slope
    mu_c: float  # mean cost per log N
    delta2_c: float  # cost variance slope
    mu_hat: float  # invariant-measure average of the cost
    delta_hat2: float  # dynamical variance of the cost
    muc_check: str = "unchecked"
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())


def constants(
    algo: str | Algorithm,
    cost: DigitCost,
    cfg: OperatorConfig = OperatorConfig(),
) -> ConstantsBundle:
    """Evaluate the constant formulas from the pressure partials at (1, 0)."""
    alg = get_algorithm(algo)
    part = pressure_derivatives(alg, cost, cfg)
    Ls, Lw = part["lambda_s"], part["lambda_w"]
    Lss, Lww, Lsw = part["lambda_ss"], part["lambda_ww"], part["lambda_sw"]
    if Ls >= 0:
        raise InconsistencyError(f"Lambda'(1) = {Ls} must be negative")
    if Lss <= 0:
        raise InconsistencyError(f"Lambda''(1) = {Lss} must be positive")
    aLs = abs(Ls)
    mu = 2.0 / aLs
    delta2 = 2.0 * Lss / aLs**3
    mu_c = 2.0 * Lw / aLs
    delta2_c = (
        2.0 * Lw**2 * Lss / aLs**3 + 4.0 * Lw * Lsw / aLs**2 + 2.0 * Lww / aLs
    )
    from .realdyn import mu_hat_closed_form

    mu_hat = mu_hat_closed_form(alg, cost)
    # the pressure is log lambda, so its second w-partial is already the
    # dynamical variance lambda''_ww - (lambda'_w)^2 at lambda = 1
    delta_hat2 = Lww
    decomposition = mu_hat**2 * delta2 + mu * Lww + mu**2 * mu_hat * Lsw
    if delta2_c <= 0:
        raise InconsistencyError(f"delta2(c) = {delta2_c} must be positive")
    rel = abs(decomposition - delta2_c) / abs(delta2_c)
    if rel > 1e-8:
        raise InconsistencyError(
            f"variance decomposition mismatch: {decomposition} vs {delta2_c} (rel {rel:.2e})"
        )
    muc_rel = abs(mu_c - mu * mu_hat) / abs(mu_c)
    muc_check = "pass" if muc_rel <= 1e-8 else f"fail (rel {muc_rel:.2e})"
    if muc_rel > 1e-8:
        raise InconsistencyError(f"mu(c) = {mu_c} vs mu*mu_hat = {mu * mu_hat}")
    return ConstantsBundle(
        algo_id=alg.id,
        cost_desc=cost.descriptor(),
        lambda_s=Ls,
        lambda_w=Lw,
        lambda_ss=Lss,
        lambda_ww=Lww,
        lambda_sw=Lsw,
        mu=mu,
        delta2=delta2,
        mu_c=mu_c,
        delta2_c=delta2_c,
        mu_hat=mu_hat,
        delta_hat2=delta_hat2,
        muc_check=muc_check,
        config={"degree": cfg.degree, "m_cap": cfg.m_cap, "tail_tol": cfg.tail_tol},
    )


def solve_sigma(
    algo: str | Algorithm,
    cost: DigitCost,
    nu: float,
    cfg: OperatorConfig = OperatorConfig(),
) -> float:
    """The unique real sigma near 1 with lambda(sigma, nu) = 1.

    Bisection on a bracket (lambda is strictly decreasing in sigma), then
    secant refinement.
    """
    alg = get_algorithm(algo)

    def g(s: float) -> float:
        return lambda_fn(alg, cost, s, nu, cfg) - 1.0

    # lambda is strictly decreasing in sigma; bracket with g(lo) > 0 > g(hi)
    lo, hi = 0.8, 1.2
    while g(hi) > 0.0:
        hi += 0.2
        if hi > 3.5:
            raise DivergenceError(f"no upper bracket for sigma(nu) at nu = {nu}")
    while g(lo) < 0.0:
        lo -= 0.05
        if lo <= 0.505:
            raise DivergenceError(f"no lower bracket for sigma(nu) at nu = {nu}")
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    a, b = lo, hi
    fa, fb = g(a), g(b)
    for _ in range(8):
        if fb == fa:
            break
        nxt = b - fb * (b - a) / (fb - fa)
        a, fa, b, fb = b, fb, nxt, g(nxt)
    return b
