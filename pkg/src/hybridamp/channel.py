"""Channel realizations: ULA responses, geometric multipath, Kronecker shaping.

Every random draw goes through an explicit ``numpy.random.Generator`` so a
realization is a pure function of its seed. Path gains and angles are drawn
before anything that depends on the array sizes; with a fixed seed the
channel for ``N + k`` transmit antennas is therefore the channel for ``N``
antennas with ``k`` extra columns appended.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemConfig",
    "GeometricPathSet",
    "ChannelRealization",
    "array_response",
    "complex_normal",
    "draw_geometric_channel",
    "apply_kronecker",
    "make_rank_deficient_r_half",
    "draw_channel",
]


@dataclass(frozen=True)
class SystemConfig:
    """Scalar parameters of a point-to-point hybrid MIMO link.

    Attributes
    ----------
    n_tx_antennas, n_rx_antennas : int
        Transmit (N) and receive (M) array sizes.
    n_rf_tx, n_rf_rx : int
        RF chains at each end.
    n_streams : int
        Number of data streams d.
    p_max : float
        Total transmit power budget.
    noise_var : float
        Receiver noise variance per antenna.
    n_paths : int
        Number of propagation paths L of the geometric model.
    """

    n_tx_antennas: int
    n_rx_antennas: int
    n_rf_tx: int
    n_rf_rx: int
    n_streams: int
    p_max: float = 1.0
    noise_var: float = 1.0
    n_paths: int = 15

    def __post_init__(self):
        for name in ("n_tx_antennas", "n_rx_antennas", "n_rf_tx", "n_rf_rx", "n_streams", "n_paths"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not self.n_streams <= self.n_rf_tx <= self.n_tx_antennas:
            raise ValueError(
                "need n_streams <= n_rf_tx <= n_tx_antennas, got "
                f"{self.n_streams}, {self.n_rf_tx}, {self.n_tx_antennas}"
            )
        if not self.n_streams <= self.n_rf_rx <= self.n_rx_antennas:
            raise ValueError(
                "need n_streams <= n_rf_rx <= n_rx_antennas, got "
                f"{self.n_streams}, {self.n_rf_rx}, {self.n_rx_antennas}"
            )
        if not self.p_max > 0:
            raise ValueError(f"p_max must be positive, got {self.p_max!r}")
        if not self.noise_var > 0:
            raise ValueError(f"noise_var must be positive, got {self.noise_var!r}")

    @property
    def n_rf(self):
        """Common RF-chain count; the hybrid schemes require both ends to match."""
        if self.n_rf_tx != self.n_rf_rx:
            raise ValueError("transmit and receive RF-chain counts differ")
        return self.n_rf_tx


@dataclass(frozen=True)
class GeometricPathSet:
    gains: np.ndarray
    aoa: np.ndarray
    aod: np.ndarray

    def __post_init__(self):
        n = len(self.gains)
        if len(self.aoa) != n or len(self.aod) != n:
            raise ValueError("gains, aoa and aod must have the same length")

    @property
    def n_paths(self):
        return len(self.gains)


@dataclass(frozen=True)
class ChannelRealization:
    """A channel ``h = r_half @ h_geo @ s_half`` together with its parts."""

    h: np.ndarray
    h_geo: np.ndarray
    r_half: np.ndarray
    s_half: np.ndarray
    paths: GeometricPathSet


def complex_normal(rng, size):
    """Draw CN(0, 1) samples: independent real and imaginary parts of variance 1/2."""
    parts = rng.standard_normal(size=(2,) + tuple(np.atleast_1d(size)))
    return (parts[0] + 1j * parts[1]) / np.sqrt(2.0)


def array_response(phi, n_elements):
    """Half-wavelength ULA response ``exp(i*pi*n*sin(phi)) / sqrt(n_elements)``."""
    if int(n_elements) != n_elements or n_elements < 1:
        raise ValueError(f"n_elements must be a positive integer, got {n_elements!r}")
    n = np.arange(int(n_elements))
    return np.exp(1j * np.pi * n * np.sin(phi)) / np.sqrt(n_elements)


def _array_responses(phis, n_elements):
    # Columns are array_response(phi) for each phi.
    n = np.arange(n_elements)[:, None]
    return np.exp(1j * np.pi * n * np.sin(np.asarray(phis))[None, :]) / np.sqrt(n_elements)


def draw_geometric_channel(config, rng):
    """Draw an M x N geometric multipath matrix with ``config.n_paths`` paths.

    Returns
    -------
    h_geo : ndarray, shape (M, N)
    paths : GeometricPathSet
    """
    n_paths = config.n_paths
    gains = complex_normal(rng, n_paths)
    aoa = rng.uniform(0.0, 2.0 * np.pi, size=n_paths)
    aod = rng.uniform(0.0, 2.0 * np.pi, size=n_paths)
    m, n = config.n_rx_antennas, config.n_tx_antennas
    a_r = _array_responses(aoa, m)
    a_t = _array_responses(aod, n)
    h_geo = np.sqrt(n * m / n_paths) * (a_r * gains) @ a_t.conj().T
    return h_geo, GeometricPathSet(gains=gains, aoa=aoa, aod=aod)


def apply_kronecker(r_half, h_geo, s_half):
    r_half, h_geo, s_half = (np.asarray(a) for a in (r_half, h_geo, s_half))
    m, n = h_geo.shape
    if r_half.shape != (m, m) or s_half.shape != (n, n):
        raise ValueError(
            f"correlation factors {r_half.shape} and {s_half.shape} do not conform "
            f"with a {m}x{n} channel"
        )
    return r_half @ h_geo @ s_half


def make_rank_deficient_r_half(m, rank, rng):
    """Receive correlation square root of rank ``rank`` with unit-norm rows.

    The first ``rank`` rows are normalized CN(0, I) vectors. Each remaining
    row is a normalized combination of them with fresh CN(0, 1) weights.
    """
    if rank < 1 or rank > m:
        raise ValueError(f"rank must lie in [1, {m}], got {rank}")
    basis = complex_normal(rng, (rank, m))
    basis /= np.linalg.norm(basis, axis=1, keepdims=True)
    rows = [basis]
    for _ in range(m - rank):
        row = complex_normal(rng, rank) @ basis
        rows.append((row / np.linalg.norm(row))[None, :])
    return np.vstack(rows)


def draw_channel(config, rng, rank_deficient=False):
    """Draw one Kronecker channel; ``S^{1/2} = I`` and ``R^{1/2}`` is I or rank-deficient."""
    h_geo, paths = draw_geometric_channel(config, rng)
    m, n = h_geo.shape
    if rank_deficient:
        r_half = make_rank_deficient_r_half(m, config.n_rf_rx, rng)
        h = r_half @ h_geo
    else:
        r_half = np.eye(m, dtype=complex)
        h = h_geo
    s_half = np.eye(n, dtype=complex)
    return ChannelRealization(h=h, h_geo=h_geo, r_half=r_half, s_half=s_half, paths=paths)
