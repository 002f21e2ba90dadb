"""SVD, water-filling, the fully digital baseline and rate evaluation."""

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "NumericalError",
    "UnusableChannelError",
    "Scheme",
    "ChannelDecomposition",
    "PowerAllocation",
    "Precoder",
    "Postcoder",
    "decompose",
    "waterfill",
    "achievable_rate",
    "achievable_rate_full",
    "parallel_channel_rate",
    "fully_digital_baseline",
    "transmit_power",
    "antenna_power_terms",
    "inv_sqrt_psd",
]

# Largest condition number of W W^H accepted by the rate evaluator.
MAX_CONDITION = 1e12


class NumericalError(ArithmeticError):
    """A construction hit a singular or ill-conditioned intermediate."""


class UnusableChannelError(NumericalError):
    """Every mode offered to water-filling has zero gain."""


class Scheme(str, enum.Enum):
    FULLY_DIGITAL = "digital"
    RF_CHAIN_AMPS = "rf_amps"
    ANTENNA_AMPS = "antenna_amps"
    PHASE_SHIFTER_AMPS = "ps_amps"


@dataclass(frozen=True)
class ChannelDecomposition:
    """Full SVD ``h = u @ diag(sigma) @ v^H`` and its ``k`` dominant slices."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    k: int

    @property
    def u_c(self):
        return self.u[:, : self.k]

    @property
    def v_c(self):
        return self.v[:, : self.k]

    def u_c_row(self, i):
        return self.u_c[i]

    def v_c_row(self, i):
        return self.v_c[i]

    def reconstruct(self):
        m, n = self.u.shape[0], self.v.shape[0]
        s = np.zeros((m, n))
        r = len(self.sigma)
        s[:r, :r] = np.diag(self.sigma)
        return self.u @ s @ self.v.conj().T


@dataclass(frozen=True)
class PowerAllocation:
    powers: np.ndarray
    water_level: float

    @property
    def gamma(self):
        """Diagonal amplitude matrix ``diag(sqrt(p_i))``."""
        return np.diag(np.sqrt(self.powers))


@dataclass(frozen=True)
class Precoder:
    """Factored precoder ``F = f_analog @ f_digital``.

    ``f_ps`` and ``b_tx`` are the phase-shifter matrix and antenna gains for
    the schemes that have them; ``gamma_e`` holds the per-stream amplitudes.
    """

    f_analog: np.ndarray
    f_digital: np.ndarray
    gamma_e: np.ndarray
    scheme: Scheme
    f_ps: Optional[np.ndarray] = None
    b_tx: Optional[np.ndarray] = None

    @property
    def matrix(self):
        return self.f_analog @ self.f_digital

    @property
    def powers(self):
        return np.abs(self.gamma_e) ** 2


@dataclass(frozen=True)
class Postcoder:
    """Factored combiner ``W = w_digital @ w_analog`` of shape (d, M)."""

    w_analog: np.ndarray
    w_digital: np.ndarray
    scheme: Scheme
    w_ps: Optional[np.ndarray] = None
    b_rx: Optional[np.ndarray] = field(default=None)

    @property
    def matrix(self):
        return self.w_digital @ self.w_analog


def decompose(h, k):
    h = np.asarray(h)
    if h.ndim != 2:
        raise ValueError("h must be a matrix")
    if not np.all(np.isfinite(h)):
        raise ValueError("h contains non-finite entries")
    if not 1 <= k <= min(h.shape):
        raise ValueError(f"k must lie in [1, {min(h.shape)}], got {k}")
    u, sigma, vh = np.linalg.svd(h, full_matrices=True)
    return ChannelDecomposition(u=u, sigma=sigma, v=vh.conj().T, k=int(k))


def waterfill(gains, p_max, noise_var, d):
    """Water-filling over the ``d`` strongest of the singular values ``gains``.

    Mode ``i`` receives ``max(0, mu - noise_var / gains[i]**2)`` with the
    water level ``mu`` set by the total power ``p_max``. Solved exactly by
    dropping the weakest active mode until every power is nonnegative.

    Parameters
    ----------
    gains : array_like
        Singular values, sorted non-increasing.
    p_max : float
        Power budget.
    noise_var : float
        Noise variance.
    d : int
        Number of modes to allocate over.

    Returns
    -------
    PowerAllocation
        ``powers`` has length ``d``.

    Raises
    ------
    UnusableChannelError
        If all of the top ``d`` gains are zero.
    """
    gains = np.asarray(gains, dtype=float)
    if d < 1 or d > len(gains):
        raise ValueError(f"d must lie in [1, {len(gains)}], got {d}")
    if p_max <= 0 or noise_var <= 0:
        raise ValueError("p_max and noise_var must be positive")
    top = gains[:d]
    if np.any(top < 0) or np.any(np.diff(top) > 0):
        raise ValueError("gains must be nonnegative and sorted non-increasing")
    n_active = int(np.count_nonzero(top > 0))
    if n_active == 0:
        raise UnusableChannelError("all channel gains are zero")
    with np.errstate(divide="ignore"):
        floor = noise_var / top[:n_active] ** 2
    # floor is non-decreasing, so the active set is always a prefix.
    while True:
        mu = (p_max + floor[:n_active].sum()) / n_active
        if mu > floor[n_active - 1] or n_active == 1:
            break
        n_active -= 1
    powers = np.zeros(d)
    powers[:n_active] = mu - floor[:n_active]
    return PowerAllocation(powers=powers, water_level=float(mu))


def parallel_channel_rate(gains, powers, noise_var):
    """Sum rate ``sum log2(1 + p_i g_i^2 / noise_var)`` of parallel channels."""
    gains = np.asarray(gains, dtype=float)[: len(powers)]
    return float(np.sum(np.log2(1.0 + np.asarray(powers) * gains**2 / noise_var)))


def _log2det_pd(a):
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("determinant argument is not positive definite") from exc
    return 2.0 * float(np.sum(np.log2(np.real(np.diag(chol)))))


def achievable_rate(h, f, w, noise_var):
    """Spectral efficiency in bits/s/Hz of the link ``W H F`` under noise ``noise_var``.

    Evaluates ``log2 det(I_d + (W W^H)^{-1} (W H F)(W H F)^H / noise_var)``,
    which equals the M x M projection form by Sylvester's identity. The
    Cholesky factor of ``W W^H`` whitens the combined noise so the
    determinant argument is Hermitian positive definite.
    """
    h, f, w = np.asarray(h), np.asarray(f), np.asarray(w)
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    if w.shape[1] != h.shape[0] or f.shape[0] != h.shape[1]:
        raise ValueError(f"shapes {w.shape}, {h.shape}, {f.shape} do not conform")
    gram = w @ w.conj().T
    eig = np.linalg.eigvalsh(gram)
    if eig[0] <= 0 or eig[-1] > MAX_CONDITION * eig[0]:
        raise ValueError("combiner W is rank deficient (cond(W W^H) > 1e12)")
    chol = np.linalg.cholesky(gram)
    whitened = np.linalg.solve(chol, w @ h @ f)
    k = np.eye(gram.shape[0]) + whitened @ whitened.conj().T / noise_var
    return max(_log2det_pd(k), 0.0)


def achievable_rate_full(h, f, w, noise_var):
    """Literal M x M evaluation of the rate; reference for ``achievable_rate``."""
    h, f, w = np.asarray(h), np.asarray(f), np.asarray(w)
    m = h.shape[0]
    proj = w.conj().T @ np.linalg.solve(w @ w.conj().T, w)
    sign, logdet = np.linalg.slogdet(np.eye(m) + proj @ h @ f @ f.conj().T @ h.conj().T / noise_var)
    return float(np.real(logdet)) / np.log(2.0)


def fully_digital_baseline(decomp, config):
    """SVD precoding with water-filling over all ``min(M, N)`` modes.

    Returns
    -------
    precoder : Precoder
        ``F = V @ Gamma``.
    postcoder : Postcoder
        ``W = U^H``.
    rate : float
        Closed-form sum rate of the parallel channels.
    """
    n_modes = len(decomp.sigma)
    alloc = waterfill(decomp.sigma, config.p_max, config.noise_var, n_modes)
    n, m = decomp.v.shape[0], decomp.u.shape[0]
    precoder = Precoder(
        f_analog=np.eye(n, dtype=complex),
        f_digital=decomp.v[:, :n_modes] @ alloc.gamma,
        gamma_e=np.sqrt(alloc.powers),
        scheme=Scheme.FULLY_DIGITAL,
    )
    postcoder = Postcoder(
        w_analog=np.eye(m, dtype=complex),
        w_digital=decomp.u.conj().T,
        scheme=Scheme.FULLY_DIGITAL,
    )
    rate = parallel_channel_rate(decomp.sigma, alloc.powers, config.noise_var)
    return precoder, postcoder, rate


def transmit_power(f):
    f = np.asarray(f)
    return float(np.real(np.vdot(f, f)))


def antenna_power_terms(f_ps, f_digital):
    """Per-antenna powers ``a_i = diag(F_PS F_D F_D^H F_PS^H)`` before amplification."""
    rows = np.asarray(f_ps) @ np.asarray(f_digital)
    return np.sum(np.abs(rows) ** 2, axis=1)


def inv_sqrt_psd(gram, floor=1e-12):
    """Inverse square root of a Hermitian PSD matrix via its eigendecomposition.

    Raises NumericalError if any eigenvalue lies below ``floor * lambda_max``.
    """
    eig, vec = np.linalg.eigh(gram)
    if eig[-1] <= 0 or eig[0] < floor * eig[-1]:
        raise NumericalError("Gram matrix is singular to working precision")
    return (vec / np.sqrt(eig)) @ vec.conj().T
