"""Photon sorting in chiral waveguide QED: scattering, modal analysis, and pulse optimization."""

from .grids import (
    GAMMA_1,
    Grid,
    Pulse,
    make_grid,
    lorentzian_pulse,
    gaussian_pulse,
    exp_decay_pulse,
    to_time_domain,
    to_momentum_domain,
    inner,
    norm,
    normalize,
)
from .scattering import (
    Emitter,
    EmitterChain,
    TwoPhotonState,
    transmission,
    apply_single_photon,
    apply_two_photon_emitter,
    apply_two_photon_chain,
    product_state,
    negate_momenta,
    phase_ramp,
)

__version__ = "0.1.0"
