"""Pulse-shape optimizers: normalized gradient flow and iterative filtering.

The gradient flow descends the chosen objective on the unit sphere,

    phi  <-  normalize(phi - dtau * dJ/dconj(phi)),

with a backtracking safeguard: a step that increases the objective is
rejected and retried at half the step size, and the base step is restored
after ten consecutive accepted steps.  Accepted objective values are
therefore non-increasing and the fixed points are unaffected.

The iterative filter needs only scattered states, no gradient: per round the
two-photon output is scattered, stripped of every component occupying the
single-photon output mode, time reversed, scattered again, and the dominant
Takagi mode of the result (time reversed once more) seeds the next round.
Time reversal of an amplitude is conj + momentum negation, which makes a
perfect sorter an exact fixed point of the round map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import Pulse, normalize, reverse_momentum
from .modal import extract_c1_theta, extract_c2, takagi
from .objective import GradientResult, ObjectiveKind, error_value, gradient
from .scattering import (
    EmitterChain,
    TwoPhotonState,
    apply_single_photon,
    apply_two_photon_chain,
    negate_momenta,
    product_state,
)

__all__ = [
    "FlowParams",
    "OptimizationTrace",
    "gradient_flow",
    "iterative_filter",
    "multi_seed",
]

_BACKTRACK_RESET = 10
_MIN_STEP_FRACTION = 1e-12


@dataclass
class FlowParams:
    dtau: float = 0.05
    max_iters: int = 20000
    tol: float = 1e-10
    kind: ObjectiveKind = ObjectiveKind.PLAIN

    def __post_init__(self):
        if not self.dtau > 0:
            raise ValueError(f"step size must be positive, got {self.dtau}")
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")


@dataclass
class OptimizationTrace:
    """Per-iteration scalars, decimated pulse snapshots, and the final pulse."""

    iterations: list[tuple[int, float, float]] = field(default_factory=list)
    snapshots: list[tuple[int, Pulse]] = field(default_factory=list)
    final_pulse: Pulse | None = None
    converged: bool = False
    seed_spread: float | None = None

    @property
    def final_value(self) -> float:
        return self.iterations[-1][1]

    @property
    def final_fidelity(self) -> float:
        return self.iterations[-1][2]


def gradient_flow(chain: EmitterChain, seed: Pulse, params: FlowParams | None = None) -> OptimizationTrace:
    """Minimize the objective by normalized steepest descent from a seed pulse."""
    params = params or FlowParams()
    kind = params.kind
    phi = normalize(seed)
    res = gradient(chain, phi, kind)

    trace = OptimizationTrace()
    trace.iterations.append((0, res.value, kind.fidelity(res.value)))
    trace.snapshots.append((0, phi))

    step = params.dtau
    streak = 0
    converged = False
    for it in range(1, params.max_iters + 1):
        accepted: GradientResult | None = None
        cand = phi
        while step >= params.dtau * _MIN_STEP_FRACTION:
            cand = normalize(Pulse(phi.grid, phi.amp - step * res.grad.amp, "k"))
            trial = gradient(chain, cand, kind)
            if trial.value <= res.value:
                accepted = trial
                break
            step *= 0.5
            streak = 0
        if accepted is None:
            converged = True  # no descent direction left at the smallest step
            break
        streak += 1
        if streak >= _BACKTRACK_RESET:
            step = params.dtau
            streak = 0
        delta = res.value - accepted.value
        phi, res = cand, accepted
        trace.iterations.append((it, res.value, kind.fidelity(res.value)))
        if it % 100 == 0:
            trace.snapshots.append((it, phi))
        if delta < params.tol:
            converged = True
            break

    trace.final_pulse = phi
    trace.converged = converged
    if trace.snapshots[-1][0] != trace.iterations[-1][0]:
        trace.snapshots.append((trace.iterations[-1][0], phi))
    return trace


def _time_reverse_state(s: TwoPhotonState) -> TwoPhotonState:
    return negate_momenta(TwoPhotonState(s.grid, np.conj(s.amp)))


def _time_reverse_pulse(p: Pulse) -> Pulse:
    return reverse_momentum(Pulse(p.grid, np.conj(p.amp), "k"))


def iterative_filter(
    chain: EmitterChain,
    seed: Pulse,
    max_rounds: int = 60,
    tol: float = 1e-12,
) -> OptimizationTrace:
    """Measurement-style optimization that never touches the scattering kernel's gradient.

    Reliable convergence is only established for chains of even length; odd
    chains run too but may return with ``converged=False``.
    """
    phi = normalize(seed)
    trace = OptimizationTrace()
    e = error_value(chain, phi)
    trace.iterations.append((0, e, 1.0 - e))
    trace.snapshots.append((0, phi))
    best_e, best_phi = e, phi

    converged = False
    for rnd in range(1, max_rounds + 1):
        psi_raw = apply_single_photon(chain, phi)
        psi = normalize(psi_raw)
        state = apply_two_photon_chain(chain, product_state(phi))

        c2 = extract_c2(psi, state)
        c1, theta = extract_c1_theta(psi, state)
        unwanted = c2 * np.outer(psi.amp, psi.amp)
        unwanted += (c1 / np.sqrt(2.0)) * (np.outer(psi.amp, theta.amp) + np.outer(theta.amp, psi.amp))
        remainder = TwoPhotonState(state.grid, state.amp - unwanted)

        second = apply_two_photon_chain(chain, _time_reverse_state(remainder))
        leading = takagi(second).modes[0]
        phi = normalize(_time_reverse_pulse(leading))

        prev, e = e, error_value(chain, phi)
        trace.iterations.append((rnd, e, 1.0 - e))
        trace.snapshots.append((rnd, phi))
        if e < best_e:
            best_e, best_phi = e, phi
        if abs(prev - e) < tol:
            converged = True
            break

    trace.final_pulse = best_phi
    trace.converged = converged
    return trace


def multi_seed(chain: EmitterChain, seeds: list[Pulse], params: FlowParams | None = None) -> OptimizationTrace:
    """Run the gradient flow from every seed and keep the best result.

    ``seed_spread`` on the returned trace is the spread (max - min) of the
    final objective values across seeds.
    """
    if not seeds:
        raise ValueError("at least one seed pulse is required")
    traces = [gradient_flow(chain, s, params) for s in seeds]
    finals = [t.final_value for t in traces]
    best = traces[int(np.argmin(finals))]
    best.seed_spread = float(max(finals) - min(finals))
    return best
