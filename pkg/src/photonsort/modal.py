"""Takagi mode analysis of two-photon states and the sorting figures of merit.

A bosonic two-photon amplitude is complex symmetric, so it factorizes as

    Psi(k1, k2) = sum_n a_n f_n(k1) f_n(k2)

with orthonormal modes f_n and non-negative weights a_n (phases absorbed
into the modes).  Projecting the output onto the single-photon output mode
psi gives the unwanted double- and single-occupation amplitudes

    c2        = <psi psi | Psi>,
    c1 th(k)  = sqrt(2) * integral dk1 conj(psi(k1)) Psi(k1, k) - sqrt(2) c2 psi(k),

with c1 taken real non-negative and th normalized and orthogonal to psi.
The sorting error is E = c1^2 + |c2|^2.  With photon loss the reference
mode is the renormalized psi/sqrt(N1) and the survival probabilities
N1 = ||psi||^2, N2 = ||Psi||^2 enter the total fidelity Ft = N2 - E and the
conditional fidelity Fc = 1 - E/N2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .grids import Grid, Pulse, inner, normalize
from .scattering import (
    EmitterChain,
    TwoPhotonState,
    apply_single_photon,
    apply_two_photon_chain,
    product_state,
)

__all__ = [
    "TakagiDecomposition",
    "SortingReport",
    "takagi",
    "extract_c2",
    "extract_c1_theta",
    "sorting_report",
]


@dataclass
class TakagiDecomposition:
    """Weights (descending magnitude) and orthonormal modes of a symmetric state."""

    eigenvalues: np.ndarray
    modes: list[Pulse]

    def reconstruct(self) -> TwoPhotonState:
        grid = self.modes[0].grid
        amp = np.zeros((grid.n, grid.n), dtype=np.complex128)
        for a_n, f_n in zip(self.eigenvalues, self.modes):
            amp += a_n * np.outer(f_n.amp, f_n.amp)
        return TwoPhotonState(grid, amp)

    def weights(self) -> np.ndarray:
        return np.abs(self.eigenvalues) ** 2


def takagi(s: TwoPhotonState, degeneracy_gap: float = 1e-10) -> TakagiDecomposition:
    """Takagi factorization via SVD with per-block phase correction.

    For A = U S V^H with A symmetric, U and conj(V) agree columnwise up to a
    unitary that mixes only degenerate singular values; the symmetric square
    root of Z = U^T W (W the right singular vectors) restores A = U' S U'^T
    blockwise.  Numerically zero singular values keep their raw columns.
    """
    if s.symmetry_defect() > 1e-10:
        raise ValueError("Takagi factorization requires a symmetric amplitude")
    a = s.amp * s.grid.dk
    u, sv, vh = np.linalg.svd(a)
    w = vh.conj().T

    zero_floor = max(sv[0], 1.0) * 1e-13
    start = 0
    n = len(sv)
    while start < n:
        stop = start + 1
        while stop < n and (sv[stop - 1] - sv[stop]) < degeneracy_gap:
            stop += 1
        if sv[start] > zero_floor:
            blk = slice(start, stop)
            z = u[:, blk].T @ w[:, blk]
            q = scipy.linalg.sqrtm(z)
            u[:, blk] = u[:, blk] @ q.conj()
        start = stop

    root_dk = np.sqrt(s.grid.dk)
    modes = [Pulse(s.grid, u[:, i] / root_dk, "k") for i in range(n)]
    return TakagiDecomposition(sv.astype(np.complex128), modes)


def _check_reference(psi: Pulse, s: TwoPhotonState) -> None:
    if psi.grid != s.grid:
        raise ValueError("reference mode and state live on different grids")
    if psi.domain != "k":
        raise ValueError("reference mode must be in the momentum domain")


def extract_c2(psi: Pulse, s: TwoPhotonState) -> complex:
    """Double-occupation amplitude of the reference mode in the state."""
    _check_reference(psi, s)
    pc = np.conj(psi.amp)
    return complex(pc @ s.amp @ pc * s.grid.dk ** 2)


def extract_c1_theta(psi: Pulse, s: TwoPhotonState) -> tuple[float, Pulse]:
    """Single-occupation amplitude and the orthogonal partner mode.

    Returns (c1, theta) with c1 real non-negative and <psi|theta> = 0; the
    partner mode is the zero pulse when c1 vanishes (it is then undefined
    and only the product c1*theta is meaningful).
    """
    _check_reference(psi, s)
    c2 = extract_c2(psi, s)
    half = s.grid.dk * (s.amp @ np.conj(psi.amp))
    g = np.sqrt(2.0) * (half - c2 * psi.amp)
    c1 = float(np.sqrt(np.sum(np.abs(g) ** 2) * s.grid.dk))
    if c1 < 1e-15:
        return 0.0, Pulse(s.grid, np.zeros(s.grid.n), "k")
    return c1, Pulse(s.grid, g / c1, "k")


@dataclass
class SortingReport:
    """All sorting figures of merit for one (chain, pulse) pair.

    ``psi_out`` is the renormalized single-photon output mode
    (psi/sqrt(N1)); the pre-loss survival lives in ``n1``.
    """

    n1: float
    n2: float
    c1: float
    c2: complex
    theta: Pulse
    error: float
    fidelity: float
    total_fidelity: float
    conditional_fidelity: float
    psi_out: Pulse
    takagi: TakagiDecomposition | None = None
    state: TwoPhotonState | None = None


def sorting_report(
    chain: EmitterChain,
    p: Pulse,
    with_takagi: bool = True,
    keep_state: bool = False,
) -> SortingReport:
    """Scatter one and two photons and assemble the full report."""
    psi_raw = apply_single_photon(chain, p)
    n1 = psi_raw.norm2()
    if n1 <= 0:
        raise ValueError("single-photon output has zero norm")
    psi = Pulse(p.grid, psi_raw.amp / np.sqrt(n1), "k")

    state = apply_two_photon_chain(chain, product_state(p))
    n2 = state.norm2()

    c2 = extract_c2(psi, state)
    c1, theta = extract_c1_theta(psi, state)
    error = c1 ** 2 + abs(c2) ** 2

    return SortingReport(
        n1=n1,
        n2=n2,
        c1=c1,
        c2=c2,
        theta=theta,
        error=error,
        fidelity=1.0 - error,
        total_fidelity=n2 - error,
        conditional_fidelity=1.0 - error / n2,
        psi_out=psi,
        takagi=takagi(state) if with_takagi else None,
        state=state if keep_state else None,
    )
