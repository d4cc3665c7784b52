"""Uniform momentum/time grids, pulse wavefunctions, and Fourier transforms.

Units: the waveguide coupling rate of the first emitter sets the scale
(``GAMMA_1 = 1``) and the propagation speed is 1, so momentum doubles as
frequency and times are in ``1/GAMMA_1``.

Pulses are stored as amplitude densities: a pulse with samples ``a_j`` on a
grid of spacing ``dk`` has ``norm**2 = sum_j |a_j|**2 * dk``, and every inner
product carries the grid measure.  The time-domain twin follows the continuum
convention

    f~(t) = (2*pi)**(-1/2) * integral dk f(k) exp(-i*k*t),

realized as an exactly unitary DFT, so Parseval holds to machine precision
and a round trip reproduces the samples exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GAMMA_1 = 1.0

__all__ = [
    "GAMMA_1",
    "Grid",
    "Pulse",
    "make_grid",
    "lorentzian_pulse",
    "gaussian_pulse",
    "exp_decay_pulse",
    "to_time_domain",
    "to_momentum_domain",
    "evaluate_time_samples",
    "inner",
    "norm",
    "normalize",
    "reverse_momentum",
    "momentum_phase_ramp",
]


@dataclass(frozen=True)
class Grid:
    """Uniform momentum grid ``k_j = -k_max + j*dk`` with even ``n``.

    The point count being even places ``k = 0`` exactly on the grid and
    leaves a single unpaired boundary point at ``-k_max``; momentum
    reversal wraps that point onto itself.  The induced time grid has
    spacing ``dt = 2*pi/(n*dk)`` and total extent ``2*pi/dk``.
    """

    n: int
    k_max: float

    @property
    def dk(self) -> float:
        return 2.0 * self.k_max / self.n

    @property
    def points(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dk

    @property
    def dt(self) -> float:
        return 2.0 * np.pi / (self.n * self.dk)

    @property
    def t_max(self) -> float:
        return (self.n // 2) * self.dt

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dt

    def step(self, domain: str) -> float:
        return self.dk if domain == "k" else self.dt

    def axis(self, domain: str) -> np.ndarray:
        return self.points if domain == "k" else self.times


def make_grid(n: int, k_max: float) -> Grid:
    """Validated grid constructor; rejects odd or undersized ``n``."""
    if n != int(n) or n % 2 != 0 or n < 64:
        raise ValueError(f"grid size must be an even integer >= 64, got {n}")
    if not k_max > 0:
        raise ValueError(f"momentum half-extent must be positive, got {k_max}")
    return Grid(int(n), float(k_max))


@dataclass
class Pulse:
    """Single-photon wavefunction sampled on a grid.

    ``domain`` is ``"k"`` (momentum samples on ``grid.points``) or ``"t"``
    (time samples on ``grid.times``).  Treated as immutable by all
    operations; functions return new pulses.
    """

    grid: Grid
    amp: np.ndarray
    domain: str = "k"

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=np.complex128)
        if amp.shape != (self.grid.n,):
            raise ValueError(f"amplitude shape {amp.shape} does not match grid size {self.grid.n}")
        if self.domain not in ("k", "t"):
            raise ValueError(f"domain must be 'k' or 't', got {self.domain!r}")
        object.__setattr__(self, "amp", amp)

    @property
    def step(self) -> float:
        return self.grid.step(self.domain)

    @property
    def axis(self) -> np.ndarray:
        return self.grid.axis(self.domain)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2) * self.step)


def _check_compatible(a: Pulse, b: Pulse) -> None:
    if a.grid != b.grid:
        raise ValueError("pulses live on different grids")
    if a.domain != b.domain:
        raise ValueError(f"pulses live in different domains ({a.domain!r} vs {b.domain!r})")


def inner(a: Pulse, b: Pulse) -> complex:
    """<a|b> = sum conj(a) * b * step."""
    _check_compatible(a, b)
    return complex(np.vdot(a.amp, b.amp) * a.step)


def norm(p: Pulse) -> float:
    return float(np.sqrt(p.norm2()))


def normalize(p: Pulse) -> Pulse:
    n2 = p.norm2()
    if n2 <= 0.0 or not np.isfinite(n2):
        raise ValueError("cannot normalize a zero or non-finite pulse")
    return Pulse(p.grid, p.amp / np.sqrt(n2), p.domain)


def lorentzian_pulse(grid: Grid, sigma: float) -> Pulse:
    """Normalized Lorentzian profile ``amp ~ 1/(k**2 + sigma**2)``."""
    if not sigma > 0:
        raise ValueError(f"linewidth must be positive, got {sigma}")
    k = grid.points
    return normalize(Pulse(grid, 1.0 / (k ** 2 + sigma ** 2)))


def gaussian_pulse(grid: Grid, width_param: float = 1.0) -> Pulse:
    """Normalized Gaussian ``amp ~ exp(-2*(k/width_param)**2)``; width 1 by default."""
    if not width_param > 0:
        raise ValueError(f"width parameter must be positive, got {width_param}")
    k = grid.points
    return normalize(Pulse(grid, np.exp(-2.0 * (k / width_param) ** 2)))


def exp_decay_pulse(grid: Grid, rate: float = 1.0) -> Pulse:
    """Normalized one-sided exponential: ``amp ~ 1/(k + i*rate/2)``.

    Its time-domain twin is ~ theta(t)*exp(-rate*t/2), an asymmetric decay.
    """
    if not rate > 0:
        raise ValueError(f"decay rate must be positive, got {rate}")
    k = grid.points
    return normalize(Pulse(grid, 1.0 / (k + 0.5j * rate)))


def _alternating_signs(n: int) -> np.ndarray:
    s = np.ones(n)
    s[1::2] = -1.0
    return s


def to_time_domain(p: Pulse) -> Pulse:
    """Unitary transform of momentum samples to the induced time grid.

    Exact discretization of f~(t) = (2*pi)**(-1/2) * integral dk f(k) e^{-ikt}
    on ``grid.times``; Parseval holds exactly.
    """
    if p.domain != "k":
        raise ValueError("pulse is already in the time domain")
    g = p.grid
    s = _alternating_signs(g.n)
    phase = (-1.0) ** (g.n // 2)  # exp(-i*pi*n/2) for even n
    amp_t = (g.dk / np.sqrt(2.0 * np.pi)) * phase * s * np.fft.fft(s * p.amp)
    return Pulse(g, amp_t, "t")


def to_momentum_domain(p: Pulse) -> Pulse:
    """Inverse of :func:`to_time_domain`; exact round trip."""
    if p.domain != "t":
        raise ValueError("pulse is already in the momentum domain")
    g = p.grid
    s = _alternating_signs(g.n)
    phase = (-1.0) ** (g.n // 2)
    amp_k = (g.dt * g.n / np.sqrt(2.0 * np.pi)) * phase * s * np.fft.ifft(s * p.amp)
    return Pulse(g, amp_k, "k")


def evaluate_time_samples(p: Pulse, times: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Evaluate the time-domain twin at arbitrary times by direct summation.

    Exact for the band-limited interpolant; O(len(times) * n), chunked to
    bound memory.
    """
    if p.domain != "k":
        raise ValueError("time samples are evaluated from the momentum representation")
    k = p.grid.points
    coeff = p.amp * (p.grid.dk / np.sqrt(2.0 * np.pi))
    times = np.asarray(times, dtype=float)
    out = np.empty(times.shape, dtype=np.complex128)
    flat_t = times.ravel()
    flat_out = out.ravel()
    for lo in range(0, flat_t.size, chunk):
        tt = flat_t[lo : lo + chunk]
        flat_out[lo : lo + chunk] = np.exp(-1j * np.outer(tt, k)) @ coeff
    return out


def reverse_momentum(p: Pulse) -> Pulse:
    """Map f(k) -> f(-k); the unpaired boundary point wraps onto itself."""
    if p.domain != "k":
        raise ValueError("momentum reversal acts on momentum-domain pulses")
    return Pulse(p.grid, np.roll(p.amp[::-1], 1), "k")


def momentum_phase_ramp(p: Pulse, t_d: float) -> Pulse:
    """Multiply by exp(i*k*t_d), i.e. delay the time-domain twin by t_d."""
    if p.domain != "k":
        raise ValueError("phase ramp acts on momentum-domain pulses")
    return Pulse(p.grid, p.amp * np.exp(1j * p.grid.points * t_d), "k")
