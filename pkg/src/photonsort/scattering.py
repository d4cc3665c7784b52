"""Photon transport through chains of chirally coupled two-level emitters.

A chiral emitter only forward-scatters, so a chain acts as the ordered
product of single-emitter maps.  One emitter with waveguide rate ``gamma``,
detuning ``delta`` and total decay ``gamma_tot = gamma/beta`` transmits a
single photon with

    t(k) = (k - delta + i*gamma_tot*(1 - 2*beta)/2) / (k - delta + i*gamma_tot/2),

which is unimodular at beta = 1 and has critical loss t(delta) = 0 at
beta = 1/2.

Two photons additionally pick up a correlated (bound-state) term that
conserves total momentum.  Acting on a symmetric amplitude Psi the
single-emitter map is

    Psi_out(k1, k2) = t(k1) t(k2) Psi(k1, k2)
                      + C * w(k1) w(k2) * I(k1 + k2),
    w(k) = 1 / (k - delta + i*gamma_tot/2),
    I(E)  = 2 * dk * sum_p w(p) Psi(p, E - p),

with the strength ``C = i*gamma**2 / (2*pi)``.  This constant is the unique
value for which the map is unitary at beta = 1 (each fixed-E shell reduces
to a rank-1 update whose unitarity requires 2*Re(gam) = -|gam|^2 * ||b||^2
with gam = C*(E - 2*delta + i*gamma_tot); the shell integral
||b||^2 = 4*pi / (gamma_tot*((E - 2*delta)^2 + gamma_tot^2)) then pins
C = i*gamma_tot^2/(2*pi)).  Unitarity and the independent master-equation
cross-check both confirm it numerically.

The energy shells of the uniform grid line up exactly (k1 + k2 is again a
grid multiple), so the correlated term costs O(n^2) and the dense
n^2 x n^2 kernel is never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import Grid, Pulse

__all__ = [
    "Emitter",
    "EmitterChain",
    "TwoPhotonState",
    "transmission",
    "apply_single_photon",
    "apply_two_photon_emitter",
    "apply_two_photon_chain",
    "apply_two_photon_chain_adjoint",
    "product_state",
    "negate_momenta",
    "phase_ramp",
    "state_inner",
    "symmetrize",
    "shell_reduce",
    "shell_energies",
]

_SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class Emitter:
    """Two-level emitter parameters, rates in units of GAMMA_1."""

    gamma: float = 1.0
    delta: float = 0.0
    beta: float = 1.0
    gamma_p: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"waveguide coupling must be positive, got {self.gamma}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"directional efficiency must satisfy 0 < beta <= 1, got {self.beta}")
        if self.gamma_p < 0:
            raise ValueError(f"dephasing rate must be non-negative, got {self.gamma_p}")

    @property
    def gamma_tot(self) -> float:
        return self.gamma / self.beta


@dataclass(frozen=True)
class EmitterChain:
    """Ordered emitters; transport applies them first to last.

    An empty chain is the identity map (useful as a test pass-through);
    configured experiments require at least one emitter.
    """

    emitters: tuple[Emitter, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "emitters", tuple(self.emitters))

    def __len__(self) -> int:
        return len(self.emitters)

    def __iter__(self):
        return iter(self.emitters)

    @classmethod
    def identical(cls, n: int, **kwargs) -> "EmitterChain":
        return cls(tuple(Emitter(**kwargs) for _ in range(n)))


@dataclass
class TwoPhotonState:
    """Symmetric two-photon amplitude Psi(k_i, k_j) on grid x grid."""

    grid: Grid
    amp: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=np.complex128)
        n = self.grid.n
        if amp.shape != (n, n):
            raise ValueError(f"amplitude shape {amp.shape} does not match grid size {n}")
        object.__setattr__(self, "amp", amp)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2) * self.grid.dk ** 2)

    def symmetry_defect(self) -> float:
        scale = np.max(np.abs(self.amp))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.amp - self.amp.T)) / scale)


def state_inner(a: TwoPhotonState, b: TwoPhotonState) -> complex:
    if a.grid != b.grid:
        raise ValueError("states live on different grids")
    return complex(np.vdot(a.amp, b.amp) * a.grid.dk ** 2)


def symmetrize(amp: np.ndarray) -> np.ndarray:
    return 0.5 * (amp + amp.T)


def _require_symmetric(s: TwoPhotonState) -> None:
    if s.symmetry_defect() > _SYMMETRY_TOL:
        raise ValueError("two-photon amplitude is not bosonic-symmetric")


# Shell bookkeeping: entry (i, j) belongs to the anti-diagonal s = i + j with
# total momentum E_s = (s - n) * dk.  Cached per grid size.
_shell_cache: dict[int, np.ndarray] = {}


def _shell_index(n: int) -> np.ndarray:
    idx = _shell_cache.get(n)
    if idx is None:
        j = np.arange(n)
        idx = j[:, None] + j[None, :]
        idx.setflags(write=False)
        _shell_cache[n] = idx
    return idx


def shell_energies(grid: Grid) -> np.ndarray:
    """Total momentum E_s of each anti-diagonal shell, s = 0 .. 2n-2."""
    return (np.arange(2 * grid.n - 1) - grid.n) * grid.dk


def shell_reduce(grid: Grid, amp: np.ndarray) -> np.ndarray:
    """Sum an n x n array over its anti-diagonals (fixed k1 + k2)."""
    idx = _shell_index(grid.n).ravel()
    size = 2 * grid.n - 1
    re = np.bincount(idx, weights=amp.real.ravel(), minlength=size)
    im = np.bincount(idx, weights=amp.imag.ravel(), minlength=size)
    return re + 1j * im


def _single_transmission(e: Emitter, k: np.ndarray) -> np.ndarray:
    gt = e.gamma_tot
    return (k - e.delta + 0.5j * gt * (1.0 - 2.0 * e.beta)) / (k - e.delta + 0.5j * gt)


def transmission(chain: EmitterChain, k) -> np.ndarray | complex:
    """Linear transmission coefficient of the chain, product over emitters."""
    karr = np.asarray(k, dtype=float)
    t = np.ones(karr.shape, dtype=np.complex128)
    for e in chain:
        t = t * _single_transmission(e, karr)
    if np.isscalar(k):
        return complex(t)
    return t


def apply_single_photon(chain: EmitterChain, p: Pulse) -> Pulse:
    """psi(k) = T(k) * phi(k); not renormalized (carries survival at beta < 1)."""
    if p.domain != "k":
        raise ValueError("transport acts on momentum-domain pulses")
    return Pulse(p.grid, transmission(chain, p.grid.points) * p.amp, "k")


def _bound_constant(e: Emitter) -> complex:
    return 0.5j * e.gamma ** 2 / np.pi


def apply_two_photon_emitter(e: Emitter, s: TwoPhotonState) -> TwoPhotonState:
    """One-emitter two-photon map; preserves symmetry and, at beta=1, norm."""
    _require_symmetric(s)
    return TwoPhotonState(s.grid, _apply_emitter_amp(e, s.grid, s.amp))


def _apply_emitter_amp(e: Emitter, grid: Grid, amp: np.ndarray) -> np.ndarray:
    k = grid.points
    t = _single_transmission(e, k)
    w = 1.0 / (k - e.delta + 0.5j * e.gamma_tot)
    shells = 2.0 * grid.dk * shell_reduce(grid, amp * w[:, None])
    out = (t[:, None] * t[None, :]) * amp
    out += _bound_constant(e) * (w[:, None] * w[None, :]) * shells[_shell_index(grid.n)]
    return out


def _apply_emitter_amp_adjoint(e: Emitter, grid: Grid, amp: np.ndarray) -> np.ndarray:
    # Hermitian adjoint of the single-emitter map; symmetrizes its input
    # since the kernel only sees the bosonic component.
    a = symmetrize(amp)
    k = grid.points
    t = _single_transmission(e, k)
    wc = np.conj(1.0 / (k - e.delta + 0.5j * e.gamma_tot))
    shells = grid.dk * shell_reduce(grid, a * (wc[:, None] * wc[None, :]))
    out = np.conj(t)[:, None] * np.conj(t)[None, :] * a
    out += np.conj(_bound_constant(e)) * (wc[:, None] + wc[None, :]) * shells[_shell_index(grid.n)]
    return out


def apply_two_photon_chain(chain: EmitterChain, s: TwoPhotonState) -> TwoPhotonState:
    """Sequential two-photon transport through the chain, in order."""
    _require_symmetric(s)
    amp = s.amp
    for e in chain:
        amp = _apply_emitter_amp(e, s.grid, amp)
    return TwoPhotonState(s.grid, amp)


def apply_two_photon_chain_adjoint(chain: EmitterChain, grid: Grid, amp: np.ndarray) -> np.ndarray:
    """Adjoint of the chain map applied to an (arbitrary) n x n amplitude.

    Used by gradient contractions; equals the inverse map at beta = 1.
    """
    out = np.asarray(amp, dtype=np.complex128)
    for e in reversed(chain.emitters):
        out = _apply_emitter_amp_adjoint(e, grid, out)
    return out


def product_state(p: Pulse) -> TwoPhotonState:
    """Psi(k1, k2) = phi(k1) * phi(k2) for a normalized pulse."""
    if p.domain != "k":
        raise ValueError("two-photon states are built in the momentum domain")
    n2 = p.norm2()
    if abs(n2 - 1.0) > 1e-8:
        raise ValueError(f"input pulse must be normalized, norm^2 = {n2!r}")
    return TwoPhotonState(p.grid, np.outer(p.amp, p.amp))


def negate_momenta(s: TwoPhotonState) -> TwoPhotonState:
    """Psi(k1, k2) -> Psi(-k1, -k2); boundary points wrap periodically."""
    return TwoPhotonState(s.grid, np.roll(s.amp[::-1, ::-1], (1, 1), axis=(0, 1)))


def phase_ramp(s: TwoPhotonState, t_d: float) -> TwoPhotonState:
    """Multiply by exp(i*(k1 + k2)*t_d): a rigid delay of both photons."""
    ramp = np.exp(1j * s.grid.points * t_d)
    return TwoPhotonState(s.grid, s.amp * (ramp[:, None] * ramp[None, :]))
