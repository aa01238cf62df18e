"""Monte Carlo probes of the beta-ensemble determinant ratio.

The chain samples angles with stationary density proportional to
prod_{mu<nu} |e^{i theta_mu} - e^{i theta_nu}|**beta on the torus, which
is the circular beta-ensemble.  The estimated functional

    exp(-(beta/2) Re sum_{k,l<=m} a_{kl} p_k p_l
        + (1 - beta/2) sum_mu log|phi'(e^{i theta_mu})|
        + sum_mu g(curve(theta_mu))),      p_k = sum_mu e^{-i k theta_mu},

has expectation D_{n,beta}[e^g] / (Z_{n,beta}(circle) cap**(beta n(n-1)/2 + n)),
so at beta = 2 it reproduces the direct determinant ratio and at other
beta it probes the conjectured limit.  Everything here is exploratory at
beta != 2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import HeavyTailWarning
from .grunsky import grunsky_coefficients, suggest_truncation
from .series import ExteriorMap, _phi_norm
from .symbol import FourierSymbol, theta_values

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap


_TUNE_BLOCK = 128
_WIDTH_MIN = 1e-3


@dataclass(frozen=True)
class ChainConfig:
    n: int
    beta: float
    steps: int
    burn_in: int
    proposal_width: float = 0.8
    seed: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if not (self.steps > self.burn_in >= 0):
            raise ValueError("need steps > burn_in >= 0")
        if not (0 < self.proposal_width <= np.pi):
            raise ValueError("proposal_width must lie in (0, pi]")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class BetaEstimate:
    mean_log: float
    std_error: float
    acceptance_rate: float
    ess: float


@njit(cache=True)
def _metropolis_kernel(theta, beta, width0, burn_in, u_prop, u_acc, out):
    """Single-site Metropolis sweeps; tuning happens only during burn-in."""
    steps, n = u_prop.shape
    width = width0
    block_acc = 0
    block_try = 0
    post_acc = 0
    post_try = 0
    kept = 0
    for t in range(steps):
        tuning = t < burn_in
        for mu in range(n):
            th = theta[mu]
            prop = th + width * (2.0 * u_prop[t, mu] - 1.0)
            if prop >= np.pi:
                prop -= 2.0 * np.pi
            elif prop < -np.pi:
                prop += 2.0 * np.pi
            d = 0.0
            reject = False
            for nu in range(n):
                if nu == mu:
                    continue
                cn = 1.0 - np.cos(prop - theta[nu])
                if cn <= 0.0:
                    reject = True
                    break
                d += np.log(cn) - np.log(1.0 - np.cos(th - theta[nu]))
            acc = False
            if not reject:
                u = 1.0 - u_acc[t, mu]  # in (0, 1]
                acc = np.log(u) < 0.5 * beta * d
            if acc:
                theta[mu] = prop
            if tuning:
                block_try += 1
                if acc:
                    block_acc += 1
            else:
                post_try += 1
                if acc:
                    post_acc += 1
        if tuning and (t + 1) % _TUNE_BLOCK == 0 and block_try > 0:
            rate = block_acc / block_try
            if rate < 0.2:
                width *= 0.75
            elif rate > 0.6:
                width *= 1.33
            if width > np.pi:
                width = np.pi
            if width < _WIDTH_MIN:
                width = _WIDTH_MIN
            block_acc = 0
            block_try = 0
        if not tuning:
            for mu in range(n):
                out[kept, mu] = theta[mu]
            kept += 1
    rate = post_acc / post_try if post_try > 0 else 1.0
    return rate, width


def _run_chain(cfg: ChainConfig):
    """Deterministic chain for one seed: (kept angles, acceptance, width)."""
    rng = np.random.default_rng(cfg.seed)
    u_prop = rng.random((cfg.steps, cfg.n))
    u_acc = rng.random((cfg.steps, cfg.n))
    theta0 = -np.pi + 2.0 * np.pi * (np.arange(cfg.n) + 0.5) / cfg.n
    out = np.empty((cfg.steps - cfg.burn_in, cfg.n))
    rate, width = _metropolis_kernel(
        theta0, cfg.beta, cfg.proposal_width, cfg.burn_in, u_prop, u_acc, out
    )
    return out, float(rate), float(width)


def sample_circular_beta(cfg: ChainConfig):
    """Yield post-burn-in angle configurations, one array per sweep."""
    out, _, _ = _run_chain(cfg)
    for row in out:
        yield row.copy()


def _heavy_tailed(w: np.ndarray) -> bool:
    """True when the top 0.1% of weights carries over half of the mean."""
    total = float(np.sum(w))
    if not total > 0:
        return False
    top = np.sort(w)[::-1][: max(1, len(w) // 1000)]
    return float(np.sum(top)) > 0.5 * total


def _autocorr_time(x: np.ndarray) -> tuple[float, float]:
    """Integrated autocorrelation time (Geyer pairing) and se of the mean."""
    T = len(x)
    xc = x - x.mean()
    f = np.fft.rfft(np.concatenate([xc, np.zeros(T)]))
    acov = np.fft.irfft(f * np.conj(f))[:T] / T
    if acov[0] <= 0:
        return 1.0, 0.0
    rho = acov / acov[0]
    tau = 1.0
    k = 1
    while k + 1 < T:
        gamma = rho[k] + rho[k + 1]
        if gamma <= 0:
            break
        tau += 2.0 * float(gamma)
        k += 2
    tau = max(tau, 1.0)
    se = float(np.sqrt(acov[0] * tau / T))
    return tau, se


def estimate_ratio(
    mp: ExteriorMap, sym: FourierSymbol, cfg: ChainConfig, m: int | None = None
) -> BetaEstimate:
    """Chain average of the determinant-ratio functional, in log scale.

    Reports log of the weight mean, a delta-method standard error, the
    effective sample size from the weight autocorrelation, and the
    post-burn-in acceptance rate.  A mean-zero symbol is recommended and
    a heavy-tail warning fires when the top 0.1% of weights carry more
    than half of the mean.
    """
    if m is None:
        m = suggest_truncation(mp)
    a = grunsky_coefficients(mp, m).a
    if abs(complex(sym.a0)) > 1e-12:
        warnings.warn("symbol has nonzero mean; consider subtracting a0/2", stacklevel=2)
    thetas, rate, _ = _run_chain(cfg)
    T = len(thetas)
    z = np.exp(-1j * thetas)
    P = np.empty((T, m), dtype=complex)
    cur = z.copy()
    for k in range(m):
        P[:, k] = cur.sum(axis=1)
        cur *= z
    quad = np.sum((P @ a) * P, axis=1).real
    gv = theta_values(sym, thetas)
    if float(np.max(np.abs(gv.imag))) > 1e-12 * max(1.0, float(np.max(np.abs(gv)))):
        raise ValueError("Monte Carlo probe supports real-valued symbols only")
    expo = -0.5 * cfg.beta * quad + np.sum(gv.real, axis=1)
    if cfg.beta != 2.0:
        zb = np.exp(1j * thetas)
        logphip = np.sum(np.log(np.abs(_phi_norm(mp, zb, 1))), axis=1)
        expo += (1.0 - 0.5 * cfg.beta) * logphip
    w = np.exp(expo)
    mean = float(np.mean(w))
    if _heavy_tailed(w):
        warnings.warn(
            HeavyTailWarning("top 0.1% of weights carry over half of the mean"),
            stacklevel=2,
        )
    tau, se_mean = _autocorr_time(w)
    std_error = max(se_mean / abs(mean), np.finfo(float).tiny) if mean != 0 else float("inf")
    return BetaEstimate(
        mean_log=float(np.log(mean)),
        std_error=std_error,
        acceptance_rate=rate,
        ess=float(T / tau),
    )


def merge_estimates(estimates) -> tuple[float, float]:
    """Inverse-variance pooling of independent chain estimates."""
    est = list(estimates)
    if not est:
        raise ValueError("nothing to merge")
    w = np.array([1.0 / e.std_error**2 for e in est])
    vals = np.array([e.mean_log for e in est])
    return float(np.sum(w * vals) / np.sum(w)), float(1.0 / np.sqrt(np.sum(w)))
