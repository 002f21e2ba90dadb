"""Hybrid precoder/combiner pairs for three analog amplifier placements.

* ``build_scheme_a`` puts the amplifiers at the RF chains. The analog stage
  is unit-modulus from coordinate ascent, followed by an SVD/water-filling
  digital precoder and an MMSE digital combiner.
* ``build_scheme_b`` adds a variable-gain amplifier at every antenna, with
  gains chosen so that the precoder rows follow the row norms of the
  dominant right singular vectors.
* ``build_scheme_c`` puts an amplifier on every phase-shifter branch. The
  analog stage is then unconstrained and realizes the dominant singular
  vectors exactly.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .core import (
    MAX_CONDITION,
    NumericalError,
    Postcoder,
    Precoder,
    Scheme,
    antenna_power_terms,
    inv_sqrt_psd,
    waterfill,
)

__all__ = [
    "PhaseShifterDesignParams",
    "phase_shifter_objective",
    "design_phase_shifters",
    "design_b_tx",
    "build_scheme_a",
    "build_scheme_b",
    "build_scheme_c",
]


@dataclass(frozen=True)
class PhaseShifterDesignParams:
    """Budget and coupling of the coordinate-ascent phase-shifter design.

    ``coupling_scalar`` is the weight on the Gram term of the surrogate
    objective. The scheme builders overwrite it with the value appropriate
    to each side of the link.
    """

    max_iterations: int = 50
    objective_tolerance: float = 1e-4
    coupling_scalar: float = 1.0

    def __post_init__(self):
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")
        if not self.objective_tolerance > 0:
            raise ValueError("objective_tolerance must be positive")
        if not self.coupling_scalar > 0:
            raise ValueError("coupling_scalar must be positive")


def phase_shifter_objective(gram, x, coupling):
    """Surrogate objective ``log2 det(I + coupling * X^H gram X)``."""
    k = np.eye(x.shape[1]) + coupling * (x.conj().T @ gram @ x)
    sign, logdet = np.linalg.slogdet(k)
    if sign.real <= 0:
        raise NumericalError("surrogate objective argument is not positive definite")
    return float(logdet) / np.log(2.0)


def _check_hermitian(gram):
    gram = np.asarray(gram, dtype=complex)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise ValueError("gram must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(gram))))
    if np.max(np.abs(gram - gram.conj().T)) > 1e-10 * scale:
        raise ValueError("gram is not Hermitian")
    return gram


def design_phase_shifters(gram, n_rf, params, rng, return_objectives=False):
    """Unit-modulus analog beamformer by element-wise coordinate ascent.

    Maximizes ``log2 det(I + a X^H gram X)`` over ``n x n_rf`` matrices X
    with unit-modulus entries, ``a = params.coupling_scalar``. Column ``j``
    enters the objective through ``x_j^H G_j x_j`` where ``G_j`` depends only
    on the other columns, so each entry has a closed-form optimal phase.
    Sweeps repeat until the objective gains less than
    ``params.objective_tolerance`` or ``params.max_iterations`` is reached.

    Parameters
    ----------
    gram : ndarray, shape (n, n)
        Hermitian PSD matrix, ``H^H H`` for a precoder or ``H F F^H H^H``
        for a combiner.
    n_rf : int
        Number of columns (RF chains).
    params : PhaseShifterDesignParams
    rng : numpy.random.Generator
        Source of the random initial phases.
    return_objectives : bool
        Also return the objective after initialization and every sweep.

    Returns
    -------
    x : ndarray, shape (n, n_rf)
    objectives : list of float, only if ``return_objectives``
    """
    gram = _check_hermitian(gram)
    n = gram.shape[0]
    if not 1 <= n_rf <= n:
        raise ValueError(f"n_rf must lie in [1, {n}], got {n_rf}")
    a = params.coupling_scalar
    x = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=(n, n_rf)))
    objective = phase_shifter_objective(gram, x, a)
    history = [objective]
    eye = np.eye(n_rf - 1)
    for _ in range(params.max_iterations):
        for j in range(n_rf):
            others = np.delete(x, j, axis=1)
            g = a * gram
            if n_rf > 1:
                fx = gram @ others
                c = eye + a * (others.conj().T @ fx)
                g = g - a * a * (fx @ np.linalg.solve(c, fx.conj().T))
            column = np.ascontiguousarray(x[:, j])
            kernels.update_column(np.ascontiguousarray(g), column)
            x[:, j] = column
        new_objective = phase_shifter_objective(gram, x, a)
        history.append(new_objective)
        improved = new_objective - objective
        objective = new_objective
        if improved < params.objective_tolerance:
            break
    if return_objectives:
        return x, history
    return x


def _digital_precoder(h, f_analog, p_max, noise_var, d):
    # Whiten the analog stage, then SVD-precode and water-fill the effective channel.
    q = inv_sqrt_psd(f_analog.conj().T @ f_analog)
    _, s, vh = np.linalg.svd(h @ f_analog @ q)
    alloc = waterfill(s, p_max, noise_var, d)
    return q @ vh.conj().T[:, :d] @ alloc.gamma, alloc


def _mmse_digital_combiner(h, f, w_eff, noise_var, powers):
    # Returned as the factor that left-multiplies w_eff^H. Streams without
    # power get an all-zero MMSE row, so only active streams keep a row.
    t = w_eff.conj().T @ h @ f[:, powers > 0]
    j = t @ t.conj().T + noise_var * (w_eff.conj().T @ w_eff)
    eig = np.linalg.eigvalsh(j)
    if eig[0] <= 0 or eig[-1] > MAX_CONDITION * eig[0]:
        raise NumericalError("MMSE matrix J is singular (condition number > 1e12)")
    return np.linalg.solve(j, t).conj().T


def _require_square_rf(config):
    n_rf = config.n_rf
    if config.n_streams != n_rf:
        raise ValueError("hybrid schemes require n_streams == n_rf")
    return n_rf


def _precoder_coupling(config):
    return config.p_max / (config.noise_var * config.n_tx_antennas * config.n_rf_tx)


def build_scheme_a(h, decomp, config, params, rng):
    """Phase-shifter-only analog stages with amplifiers at the RF chains.

    Returns
    -------
    (Precoder, Postcoder)
    """
    n_rf = _require_square_rf(config)
    d = config.n_streams
    f_ps = design_phase_shifters(
        h.conj().T @ h, n_rf, replace(params, coupling_scalar=_precoder_coupling(config)), rng
    )
    f_d, alloc = _digital_precoder(h, f_ps, config.p_max, config.noise_var, d)
    f = f_ps @ f_d
    hf = h @ f
    w_ps = design_phase_shifters(
        hf @ hf.conj().T, n_rf, replace(params, coupling_scalar=1.0 / config.noise_var), rng
    )
    w_d = _mmse_digital_combiner(h, f, w_ps, config.noise_var, alloc.powers)
    precoder = Precoder(
        f_analog=f_ps, f_digital=f_d, gamma_e=np.sqrt(alloc.powers),
        scheme=Scheme.RF_CHAIN_AMPS, f_ps=f_ps,
    )
    postcoder = Postcoder(
        w_analog=w_ps.conj().T, w_digital=w_d, scheme=Scheme.RF_CHAIN_AMPS, w_ps=w_ps,
    )
    return precoder, postcoder


def _clamp_index(a, start, exhausted):
    if a[start] > 0:
        return start
    later = np.flatnonzero(a[start + 1:] > 0)
    if later.size:
        return start + 1 + int(later[0])
    if exhausted:
        earlier = np.flatnonzero(a[:start] > 0)
        if earlier.size:
            return int(earlier[-1])
    raise NumericalError("no antenna with nonzero power left to absorb the budget")


def design_b_tx(f_digital, f_ps, p_max, decomp, config):
    """Per-antenna amplifier gains so precoder rows track the dominant subspace.

    Antenna ``k`` is offered ``sqrt(N / N_rf * p_max) * ||v_c[k]||``; antennas
    are admitted in order until the next would push the total power
    ``sum beta_k^2 a_k`` to ``p_max``. That antenna gets exactly the
    remaining budget and all later ones are switched off. If every antenna
    fits, the last one absorbs the remainder. The total is ``p_max`` either way.
    """
    a = antenna_power_terms(f_ps, f_digital)
    n = len(a)
    n_rf = decomp.k
    targets = np.sqrt(n / n_rf * p_max) * np.linalg.norm(decomp.v_c, axis=1)
    beta = np.zeros(n)
    committed = 0.0
    stop, exhausted = n - 1, True
    for k in range(n):
        contribution = targets[k] ** 2 * a[k]
        if committed + contribution >= p_max:
            stop, exhausted = k, False
            break
        beta[k] = targets[k]
        committed += contribution
    clamp = _clamp_index(a, stop, exhausted)
    beta[clamp + 1:] = 0.0
    remainder = p_max - float(np.sum(beta[:clamp] ** 2 * a[:clamp]))
    beta[clamp] = np.sqrt(max(remainder, 0.0) / a[clamp])
    return beta


def build_scheme_b(h, decomp, config, params, rng):
    """Phase shifters plus a variable-gain amplifier at every antenna.

    The antenna gains need a digital precoder and the final digital
    precoder needs the gains, so a provisional RF-chain-amplifier precoder
    seeds the gain design and the digital stage is then recomputed against
    ``B_t F_PS`` and rescaled to the water-filled power.
    """
    n_rf = _require_square_rf(config)
    d = config.n_streams
    p_max, noise_var = config.p_max, config.noise_var
    f_ps = design_phase_shifters(
        h.conj().T @ h, n_rf, replace(params, coupling_scalar=_precoder_coupling(config)), rng
    )
    f_d0, _ = _digital_precoder(h, f_ps, p_max, noise_var, d)
    b_tx = design_b_tx(f_d0, f_ps, p_max, decomp, config)
    f_a = b_tx[:, None] * f_ps
    f_d, alloc = _digital_precoder(h, f_a, p_max, noise_var, d)
    f_d = f_d / np.sqrt(p_max)
    f = f_a @ f_d
    f_d = f_d * np.sqrt(alloc.powers.sum() / np.real(np.vdot(f, f)))
    f = f_a @ f_d

    b_rx = np.linalg.norm(decomp.u_c, axis=1) / np.sqrt(n_rf)
    hf = h @ f
    w_ps = design_phase_shifters(
        hf @ hf.conj().T, n_rf, replace(params, coupling_scalar=1.0 / noise_var), rng
    )
    w_eff = b_rx[:, None] * w_ps
    w_d = _mmse_digital_combiner(h, f, w_eff, noise_var, alloc.powers)
    precoder = Precoder(
        f_analog=f_a, f_digital=f_d, gamma_e=np.sqrt(alloc.powers),
        scheme=Scheme.ANTENNA_AMPS, f_ps=f_ps, b_tx=b_tx,
    )
    postcoder = Postcoder(
        w_analog=w_eff.conj().T, w_digital=w_d, scheme=Scheme.ANTENNA_AMPS,
        w_ps=w_ps, b_rx=b_rx,
    )
    return precoder, postcoder


def build_scheme_c(decomp, config):
    """Amplifiers at the phase shifters: ``F_A = V_c Gamma_e`` and ``W_A = U_c^H``."""
    n_rf = _require_square_rf(config)
    if decomp.k != n_rf:
        raise ValueError("decomposition must keep n_rf dominant modes")
    alloc = waterfill(decomp.sigma, config.p_max, config.noise_var, n_rf)
    gamma = np.sqrt(alloc.powers)
    precoder = Precoder(
        f_analog=decomp.v_c * gamma, f_digital=np.eye(n_rf), gamma_e=gamma,
        scheme=Scheme.PHASE_SHIFTER_AMPS,
    )
    postcoder = Postcoder(
        w_analog=decomp.u_c.conj().T, w_digital=np.eye(n_rf), scheme=Scheme.PHASE_SHIFTER_AMPS,
    )
    return precoder, postcoder
