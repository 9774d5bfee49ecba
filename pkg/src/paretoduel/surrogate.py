"""Per-objective probabilistic models.

Latent objectives get a preference GP: softmax choice likelihood over the
designs of each query, Laplace approximation at the MAP of the latent
values at the observed anchors, and ML-II hyperparameters (ARD
lengthscales, signal variance, noise scale) from the Laplace-approximate
marginal likelihood. Observable objectives get exact GP regression.

Both model kinds produce pathwise posterior function samples: a random
Fourier feature prior draw plus a kernel-weighted correction conditioning
it on one posterior draw at the anchors (Matheron update), so samples are
cheap to evaluate and differentiate anywhere in the box.

Note the softmax likelihood only identifies f up to a common scaling of
(signal std, noise scale); the marginal likelihood is exactly flat along
that ray, so optimization starts always place the signal variance at 1 and
let the data move it only if it actually helps.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize
from scipy.special import logsumexp

from ._kernels import matern52_cross, matern52_grad_x
from .core import InteractionDataset
from .errors import DataError, FitError

__all__ = [
    "KernelConfig",
    "SurrogateConfig",
    "FunctionSample",
    "PreferenceModel",
    "RegressionModel",
    "preference_log_likelihood",
    "fit_preference",
    "fit_regression",
]


@dataclass(frozen=True)
class KernelConfig:
    """Matern-5/2 ARD kernel hyperparameters."""

    lengthscales: np.ndarray
    signal_variance: float
    family: str = "matern52"

    def __post_init__(self):
        ls = np.array(self.lengthscales, dtype=np.float64, copy=True)
        if np.any(ls <= 0.0) or self.signal_variance <= 0.0:
            raise DataError("kernel hyperparameters must be positive")
        ls.flags.writeable = False
        object.__setattr__(self, "lengthscales", ls)

    def cross(self, X, Z) -> np.ndarray:
        return matern52_cross(
            np.atleast_2d(X), np.atleast_2d(Z),
            self.lengthscales, self.signal_variance,
        )

    def grad_x(self, X, Z) -> np.ndarray:
        return matern52_grad_x(
            np.atleast_2d(X), np.atleast_2d(Z),
            self.lengthscales, self.signal_variance,
        )


@dataclass(frozen=True)
class SurrogateConfig:
    """Fitting knobs; bounds are in natural units, search is in log space."""

    n_features: int = 1000
    restarts: int = 5
    maxfun: int = 80
    lengthscale_bounds: tuple[float, float] = (1e-3, 1e2)
    variance_bounds: tuple[float, float] = (1e-2, 1e2)
    lambda_bounds: tuple[float, float] = (1e-3, 1e2)
    noise_variance_bounds: tuple[float, float] = (1e-8, 1e2)
    newton_max_iter: int = 100
    newton_tol: float = 1e-9
    jitter: float = 1e-10
    max_jitter: float = 1e-4


def preference_log_likelihood(latent_values, winner: int, lam: float) -> float:
    """Log softmax probability that `winner` (1-based) tops the query."""
    v = np.asarray(latent_values, dtype=np.float64) / lam
    if not 1 <= winner <= v.shape[0]:
        raise IndexError(f"winner {winner} outside 1..{v.shape[0]}")
    return float(v[winner - 1] - logsumexp(v))


def _dedup_anchors(designs: np.ndarray, tol: float = 1e-12):
    """Deduplicate rows within coordinate tolerance, preserving order.

    Returns (anchors, index) with designs[i] ~= anchors[index[i]].
    """
    anchors: list[np.ndarray] = []
    index = np.empty(designs.shape[0], dtype=np.int64)
    for i, x in enumerate(designs):
        for a, z in enumerate(anchors):
            if np.max(np.abs(z - x)) <= tol:
                index[i] = a
                break
        else:
            anchors.append(x)
            index[i] = len(anchors) - 1
    return np.asarray(anchors), index


def _comparisons_for_objective(dataset: InteractionDataset, objective: int):
    """Anchor array plus (anchor-index row, 0-based winner) per record."""
    rows = []
    winners = []
    for query, response in dataset.records:
        w = int(response.winners[objective])
        if w <= 0:
            continue
        rows.append(query.designs)
        winners.append(w - 1)
    if not rows:
        raise DataError(f"no preference records for objective {objective}")
    stacked = np.vstack(rows)
    anchors, index = _dedup_anchors(stacked)
    q = rows[0].shape[0]
    idx_rows = index.reshape(len(rows), q)
    return anchors, list(zip(idx_rows, winners))


def _loglik_grad_hess(g: np.ndarray, comps, lam: float):
    """Softmax log-likelihood, its gradient, and W = -Hessian at g."""
    n = g.shape[0]
    ll = 0.0
    grad = np.zeros(n)
    W = np.zeros((n, n))
    inv_lam = 1.0 / lam
    for idx, w in comps:
        v = g[idx] * inv_lam
        v_shift = v - v.max()
        e = np.exp(v_shift)
        Z = e.sum()
        p = e / Z
        ll += v_shift[w] - np.log(Z)
        contrib = -p * inv_lam
        contrib[w] += inv_lam
        np.add.at(grad, idx, contrib)
        block = (np.diag(p) - np.outer(p, p)) * inv_lam**2
        np.add.at(W, (idx[:, None], idx[None, :]), block)
    return ll, grad, W


def _newton_map(K, chol_K, comps, lam: float, g0, cfg: SurrogateConfig):
    """MAP of the latent anchor values under GP prior + softmax likelihood.

    Damped Newton ascent on Phi(g) = loglik(g) - g' K^{-1} g / 2 using the
    stable update g_new = (I + K W)^{-1} K (W g + grad).
    """
    n = K.shape[0]
    g = np.zeros(n) if g0 is None else np.array(g0, dtype=np.float64)

    def phi(gv, ll):
        alpha = cho_solve(chol_K, gv)
        return ll - 0.5 * float(gv @ alpha)

    ll, grad, W = _loglik_grad_hess(g, comps, lam)
    obj = phi(g, ll)
    for iteration in range(cfg.newton_max_iter):
        b = W @ g + grad
        A = np.eye(n) + K @ W
        try:
            g_new = np.linalg.solve(A, K @ b)
        except np.linalg.LinAlgError as exc:
            raise FitError(
                "Newton system singular",
                {"iteration": iteration, "lambda": lam},
            ) from exc
        step = g_new - g
        # backtracking keeps the concave ascent monotone near saturation
        t = 1.0
        for _ in range(30):
            cand = g + t * step
            ll_c, grad_c, W_c = _loglik_grad_hess(cand, comps, lam)
            obj_c = phi(cand, ll_c)
            if obj_c >= obj - 1e-12:
                break
            t *= 0.5
        delta = np.max(np.abs(t * step))
        g, ll, grad, W, obj = cand, ll_c, grad_c, W_c, obj_c
        if delta < cfg.newton_tol * max(1.0, np.max(np.abs(g))):
            return g, ll, grad, W, iteration + 1
    raise FitError(
        "Newton did not converge",
        {"iterations": cfg.newton_max_iter, "last_step": float(delta),
         "lambda": lam},
    )


def _laplace_quantities(K, comps, lam, cfg, g0=None):
    """MAP, W, and the Laplace-approximate log marginal likelihood."""
    n = K.shape[0]
    jitter = cfg.jitter
    while True:
        try:
            chol_K = cho_factor(K + jitter * np.eye(n), lower=True)
            break
        except np.linalg.LinAlgError:
            jitter *= 10.0
            if jitter > cfg.max_jitter:
                raise FitError("Gram matrix not PD", {"jitter": jitter})
    g, ll, grad, W, iters = _newton_map(K, chol_K, comps, lam, g0, cfg)
    # log det(I + Ws K Ws) via symmetric square root of W
    evals, evecs = np.linalg.eigh(W)
    Ws = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T
    B = np.eye(n) + Ws @ K @ Ws
    sign, logdet = np.linalg.slogdet(B)
    if sign <= 0:
        raise FitError("Laplace logdet non-positive", {"lambda": lam})
    alpha = cho_solve(chol_K, g)
    log_ml = ll - 0.5 * float(g @ alpha) - 0.5 * logdet
    return {
        "g": g, "W": W, "Ws": Ws, "B": B, "chol_K": chol_K, "alpha": alpha,
        "log_ml": log_ml, "grad_ll": grad, "newton_iters": iters,
        "jitter": jitter,
    }


def _rff_sample(kernel: KernelConfig, rng: np.random.Generator, F: int):
    """Random Fourier features of the Matern-5/2 spectral density.

    Frequencies follow a multivariate t with 5 degrees of freedom scaled
    by the inverse lengthscales; phases are uniform, weights standard
    normal over the paired cos/sin features.
    """
    d = kernel.lengthscales.shape[0]
    z = rng.standard_normal((F, d))
    chi = rng.chisquare(5.0, F)
    freqs = z / np.sqrt(chi / 5.0)[:, None] / kernel.lengthscales
    phases = rng.uniform(0.0, 2.0 * np.pi, F)
    weights = rng.standard_normal(2 * F)
    return freqs, phases, weights


@dataclass(frozen=True)
class FunctionSample:
    """One pathwise posterior sample, evaluable and differentiable."""

    rff_frequencies: np.ndarray  # (F, d)
    rff_phases: np.ndarray  # (F,)
    rff_weights: np.ndarray  # (2F,)
    amplitude: float  # sqrt(signal_variance / F)
    kernel: KernelConfig
    anchors: np.ndarray | None = None
    pathwise_correction: np.ndarray | None = None
    offset: float = 0.0  # constant prior mean (regression models)

    def _features(self, X: np.ndarray) -> np.ndarray:
        A = X @ self.rff_frequencies.T + self.rff_phases
        return self.amplitude * np.concatenate([np.cos(A), np.sin(A)], axis=1)

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        vals = self.offset + self._features(X) @ self.rff_weights
        if self.anchors is not None and self.anchors.shape[0] > 0:
            vals = vals + self.kernel.cross(X, self.anchors) @ (
                self.pathwise_correction
            )
        return vals

    def gradient(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        F = self.rff_frequencies.shape[0]
        A = X @ self.rff_frequencies.T + self.rff_phases
        wc, ws = self.rff_weights[:F], self.rff_weights[F:]
        inner = -np.sin(A) * wc + np.cos(A) * ws
        grad = self.amplitude * inner @ self.rff_frequencies
        if self.anchors is not None and self.anchors.shape[0] > 0:
            gk = self.kernel.grad_x(X, self.anchors)
            grad = grad + np.einsum(
                "nkd,k->nd", gk, self.pathwise_correction
            )
        return grad


class _PosteriorMixin:
    def _offset(self) -> float:
        return 0.0

    def sample_function(
        self, rng: np.random.Generator, n_features: int = 1000
    ) -> FunctionSample:
        freqs, phases, weights = _rff_sample(self.kernel, rng, n_features)
        amplitude = float(np.sqrt(self.kernel.signal_variance / n_features))
        sample = FunctionSample(
            rff_frequencies=freqs, rff_phases=phases, rff_weights=weights,
            amplitude=amplitude, kernel=self.kernel, offset=self._offset(),
        )
        anchors = self._anchor_points()
        if anchors.shape[0] == 0:
            return sample
        u = self._posterior_draw(rng)
        correction = self._condition(u - sample(anchors))
        return replace(
            sample, anchors=anchors, pathwise_correction=correction
        )


@dataclass(frozen=True)
class PreferenceModel(_PosteriorMixin):
    """Preference GP for one latent objective (Laplace posterior)."""

    kernel: KernelConfig
    noise_scale: float  # fitted softmax noise
    anchors: np.ndarray  # (n, d) distinct designs in the dataset
    laplace_mean: np.ndarray  # (n,)
    laplace_cov: np.ndarray  # (n, n)
    log_marginal: float
    diagnostics: dict = field(default_factory=dict, compare=False)
    _alpha: np.ndarray | None = None  # K^{-1} laplace_mean
    _Ws: np.ndarray | None = None
    _LB: np.ndarray | None = None  # chol of I + Ws K Ws
    _cov_chol: np.ndarray | None = None

    @classmethod
    def prior(cls, kernel: KernelConfig, noise_scale: float = 1.0):
        d = kernel.lengthscales.shape[0]
        return cls(
            kernel=kernel, noise_scale=noise_scale,
            anchors=np.zeros((0, d)), laplace_mean=np.zeros(0),
            laplace_cov=np.zeros((0, 0)), log_marginal=0.0,
        )

    def _anchor_points(self) -> np.ndarray:
        return self.anchors

    def posterior_mean(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.anchors.shape[0] == 0:
            return np.zeros(X.shape[0])
        return self.kernel.cross(X, self.anchors) @ self._alpha

    def posterior_var(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        prior = np.full(X.shape[0], self.kernel.signal_variance)
        if self.anchors.shape[0] == 0:
            return prior
        kxz = self.kernel.cross(X, self.anchors)
        v = solve_triangular(self._LB, self._Ws @ kxz.T, lower=True)
        return np.maximum(prior - np.einsum("in,in->n", v, v), 1e-12)

    def _posterior_draw(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal(self.laplace_mean.shape[0])
        return self.laplace_mean + self._cov_chol @ z

    def _condition(self, residual: np.ndarray) -> np.ndarray:
        return cho_solve(self._chol_K, residual)

    @property
    def _chol_K(self):
        return self.diagnostics["chol_K"]


@dataclass(frozen=True)
class RegressionModel(_PosteriorMixin):
    """Exact GP regression for one observable objective."""

    kernel: KernelConfig
    noise_variance: float
    train_X: np.ndarray
    train_y: np.ndarray
    log_marginal: float
    diagnostics: dict = field(default_factory=dict, compare=False)
    _alpha: np.ndarray | None = None  # (K + sigma^2 I)^{-1} y

    def _anchor_points(self) -> np.ndarray:
        return self.train_X

    def _offset(self) -> float:
        return self.diagnostics["y_mean"]

    def posterior_mean(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        ym = self.diagnostics["y_mean"]
        return ym + self.kernel.cross(X, self.train_X) @ self._alpha

    def posterior_var(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        kxz = self.kernel.cross(X, self.train_X)
        L = self.diagnostics["chol_Ky"][0]
        v = solve_triangular(L, kxz.T, lower=True)
        prior = np.full(X.shape[0], self.kernel.signal_variance)
        return np.maximum(prior - np.einsum("in,in->n", v, v), 1e-12)

    def _posterior_draw(self, rng: np.random.Generator) -> np.ndarray:
        # Matheron for noisy observations: condition the prior path on
        # y + eps rather than on a posterior draw at the training inputs
        eps = rng.standard_normal(self.train_y.shape[0]) * np.sqrt(
            self.noise_variance
        )
        return self.train_y + eps

    def _condition(self, residual: np.ndarray) -> np.ndarray:
        return cho_solve(self.diagnostics["chol_Ky"], residual)


def _median_lengthscale(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    if n < 2:
        return np.full(X.shape[1], 0.3)
    diffs = np.abs(X[:, None, :] - X[None, :, :])
    med = np.median(
        diffs[np.triu_indices(n, k=1)[0], np.triu_indices(n, k=1)[1], :],
        axis=0,
    )
    return np.clip(med, 0.05, 10.0)


def fit_preference(
    dataset: InteractionDataset,
    objective: int,
    config: SurrogateConfig | None = None,
    rng: np.random.Generator | None = None,
    init: dict | None = None,
) -> PreferenceModel:
    """Laplace-fit preference GP with ML-II hyperparameters.

    `init`, when given, seeds the first optimizer restart (warm starts
    across harness iterations); remaining restarts draw log-uniform
    hyperparameters within bounds from `rng`.
    """
    cfg = config or SurrogateConfig()
    rng = rng or np.random.default_rng(0)
    if dataset.n_records < 1:
        raise DataError("fit_preference needs at least one record")
    anchors, comps = _comparisons_for_objective(dataset, objective)
    d = anchors.shape[1]

    lb = np.concatenate([
        np.full(d, np.log(cfg.lengthscale_bounds[0])),
        [np.log(cfg.variance_bounds[0]), np.log(cfg.lambda_bounds[0])],
    ])
    ub = np.concatenate([
        np.full(d, np.log(cfg.lengthscale_bounds[1])),
        [np.log(cfg.variance_bounds[1]), np.log(cfg.lambda_bounds[1])],
    ])

    med = _median_lengthscale(anchors)
    starts = []
    if init is not None:
        starts.append(np.concatenate([
            np.log(init["lengthscales"]),
            [np.log(init["signal_variance"]), np.log(init["noise_scale"])],
        ]))
    starts.append(np.concatenate([np.log(med), [0.0, 0.0]]))
    while len(starts) < cfg.restarts:
        ls = np.exp(rng.uniform(np.log(0.05), np.log(2.0), d))
        lam = np.exp(rng.uniform(np.log(0.05), np.log(5.0)))
        starts.append(np.concatenate([np.log(ls), [0.0, np.log(lam)]]))
    starts = starts[: max(cfg.restarts, 1)]

    warm_g = {"g": None}

    def objective_fn(log_params):
        log_params = np.clip(log_params, lb, ub)
        ls = np.exp(log_params[:d])
        var = float(np.exp(log_params[d]))
        lam = float(np.exp(log_params[d + 1]))
        K = matern52_cross(anchors, anchors, ls, var)
        try:
            quant = _laplace_quantities(K, comps, lam, cfg, g0=warm_g["g"])
        except FitError:
            return 1e10
        warm_g["g"] = quant["g"]
        return -quant["log_ml"]

    best = None
    for x0 in starts:
        warm_g["g"] = None
        x0 = np.clip(x0, lb, ub)
        res = minimize(
            objective_fn, x0, method="L-BFGS-B",
            bounds=list(zip(lb, ub)),
            options={"maxfun": cfg.maxfun, "maxiter": 60},
        )
        # the optimizer contract: never worse than its own start
        f_start = objective_fn(x0)
        cand = (res.fun, res.x) if res.fun <= f_start else (f_start, x0)
        if best is None or cand[0] < best[0]:
            best = cand
    if best is None or not np.isfinite(best[0]):
        raise FitError("hyperparameter search failed", {"objective": objective})

    log_params = np.clip(best[1], lb, ub)
    ls = np.exp(log_params[:d])
    var = float(np.exp(log_params[d]))
    lam = float(np.exp(log_params[d + 1]))
    kernel = KernelConfig(lengthscales=ls, signal_variance=var)
    K = matern52_cross(anchors, anchors, ls, var)
    quant = _laplace_quantities(K, comps, lam, cfg, g0=None)

    n = anchors.shape[0]
    Ws, B = quant["Ws"], quant["B"]
    LB = np.linalg.cholesky(B)
    tmp = np.linalg.solve(B, Ws @ K)
    cov = K - K @ Ws @ tmp
    cov = 0.5 * (cov + cov.T)
    cov_jitter = 0.0
    for cov_jitter in (0.0, 1e-12, 1e-10, 1e-8):
        try:
            cov_chol = np.linalg.cholesky(cov + cov_jitter * np.eye(n))
            break
        except np.linalg.LinAlgError:
            continue
    else:
        raise FitError("Laplace covariance not PSD within 1e-8 jitter",
                       {"objective": objective})

    diagnostics = {
        "chol_K": quant["chol_K"],
        "newton_iters": quant["newton_iters"],
        "jitter": quant["jitter"],
        "cov_jitter": cov_jitter,
        "psd_ok": True,
        "grad_ll_sum": float(np.sum(quant["grad_ll"])),
        "log_ml_start": -float(objective_fn(starts[0])),
        "n_comparisons": len(comps),
    }
    return PreferenceModel(
        kernel=kernel, noise_scale=lam, anchors=anchors,
        laplace_mean=quant["g"], laplace_cov=cov,
        log_marginal=quant["log_ml"], diagnostics=diagnostics,
        _alpha=quant["alpha"], _Ws=Ws, _LB=LB, _cov_chol=cov_chol,
    )


def fit_regression(
    X,
    y,
    config: SurrogateConfig | None = None,
    rng: np.random.Generator | None = None,
    init: dict | None = None,
) -> RegressionModel:
    """Exact GP regression with ML-II hyperparameters."""
    cfg = config or SurrogateConfig()
    rng = rng or np.random.default_rng(0)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] < 2:
        raise DataError("fit_regression needs at least two observations")
    n, d = X.shape
    y_mean = float(y.mean())
    yc = y - y_mean

    lb = np.concatenate([
        np.full(d, np.log(cfg.lengthscale_bounds[0])),
        [np.log(cfg.variance_bounds[0]), np.log(cfg.noise_variance_bounds[0])],
    ])
    ub = np.concatenate([
        np.full(d, np.log(cfg.lengthscale_bounds[1])),
        [np.log(cfg.variance_bounds[1]), np.log(cfg.noise_variance_bounds[1])],
    ])

    def nll(log_params):
        log_params = np.clip(log_params, lb, ub)
        ls = np.exp(log_params[:d])
        var = float(np.exp(log_params[d]))
        s2 = float(np.exp(log_params[d + 1]))
        K = matern52_cross(X, X, ls, var) + s2 * np.eye(n)
        jitter = 0.0
        while True:
            try:
                chol = cho_factor(K + jitter * np.eye(n), lower=True)
                break
            except np.linalg.LinAlgError:
                jitter = max(jitter * 10.0, cfg.jitter)
                if jitter > cfg.max_jitter:
                    return 1e10
        alpha = cho_solve(chol, yc)
        logdet = 2.0 * np.sum(np.log(np.diag(chol[0])))
        return 0.5 * float(yc @ alpha) + 0.5 * logdet

    var0 = max(float(yc.var()), 1e-4)
    starts = []
    if init is not None:
        starts.append(np.concatenate([
            np.log(init["lengthscales"]),
            [np.log(init["signal_variance"]), np.log(init["noise_variance"])],
        ]))
    starts.append(np.concatenate([
        np.log(_median_lengthscale(X)), [np.log(var0), np.log(var0 * 0.01)],
    ]))
    while len(starts) < cfg.restarts:
        ls = np.exp(rng.uniform(np.log(0.05), np.log(2.0), d))
        s2 = np.exp(rng.uniform(np.log(1e-6), np.log(var0)))
        starts.append(np.concatenate([np.log(ls), [np.log(var0), np.log(s2)]]))

    best = None
    for x0 in starts[: max(cfg.restarts, 1)]:
        x0 = np.clip(x0, lb, ub)
        res = minimize(
            nll, x0, method="L-BFGS-B", bounds=list(zip(lb, ub)),
            options={"maxfun": cfg.maxfun, "maxiter": 60},
        )
        f_start = nll(x0)
        cand = (res.fun, res.x) if res.fun <= f_start else (f_start, x0)
        if best is None or cand[0] < best[0]:
            best = cand

    log_params = np.clip(best[1], lb, ub)
    ls = np.exp(log_params[:d])
    var = float(np.exp(log_params[d]))
    s2 = float(np.exp(log_params[d + 1]))
    kernel = KernelConfig(lengthscales=ls, signal_variance=var)
    K = matern52_cross(X, X, ls, var) + s2 * np.eye(n)
    jitter = 0.0
    while True:
        try:
            chol = cho_factor(K + jitter * np.eye(n), lower=True)
            break
        except np.linalg.LinAlgError:
            jitter = max(jitter * 10.0, cfg.jitter)
            if jitter > cfg.max_jitter:
                raise FitError("regression Gram matrix singular",
                               {"jitter": jitter})
    alpha = cho_solve(chol, yc)

    model = RegressionModel(
        kernel=kernel, noise_variance=s2, train_X=X, train_y=y,
        log_marginal=-float(best[0]),
        diagnostics={"chol_Ky": chol, "jitter": jitter, "y_mean": y_mean},
        _alpha=alpha,
    )
    return model
