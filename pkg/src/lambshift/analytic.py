"""Closed-form formulas: isolated-atom levels, RWA and beyond-RWA shift sets,
perturbative baselines and circuit parameter conversion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, PoleError, ResonanceError, ZeroShiftError
from .hilbert import SystemParams
from .normalmodes import expansion_flags
from .spectrum import Route, ShiftSet, shift_set_from_closure

# CODATA 2018 (exact in the 2019 SI)
ELEMENTARY_CHARGE = 1.602176634e-19  # C
PLANCK = 6.62607015e-34  # J s
HBAR = PLANCK / (2 * np.pi)  # J s

DISPERSIVE_MARGIN = 0.1
RWA_MARGIN = 0.5


@dataclass(frozen=True)
class TransmonCircuit:
    """Josephson inductance ``l_j`` (H) shunted by capacitance ``c`` (F)."""

    l_j: float
    c: float

    def __post_init__(self):
        if not (self.l_j > 0 and self.c > 0):
            raise ConfigurationError("l_j and c must be strictly positive")


@dataclass(frozen=True)
class IsolatedLevels:
    omega_a: float
    lambda_: float
    energies: dict

    def transition(self, n: int) -> float:
        return self.energies[n] - self.energies[n - 1]


def isolated_levels(omega_a: float, lambda_: float, n_max: int) -> IsolatedLevels:
    """First-order energies ``E_n = (omega_a - lambda)(n + 1/2) - lambda (n^2/2 - n/2 - 1/4)``."""
    if n_max < 0:
        raise ConfigurationError("n_max must be non-negative")
    energies = {}
    for n in range(int(n_max) + 1):
        energies[n] = (omega_a - lambda_) * (n + 0.5) - lambda_ * (n * n / 2 - n / 2 - 0.25)
    return IsolatedLevels(omega_a, lambda_, energies)


def _validity_flags(params, rwa=False):
    flags = set(expansion_flags(params))
    d = abs(params.delta)
    if params.g >= DISPERSIVE_MARGIN * d:
        flags.add("near_resonance")
    if rwa and d >= RWA_MARGIN * params.sigma:
        flags.add("outside_rwa")
    return flags


def _require_detuned(params):
    if params.delta == 0:
        raise ResonanceError("closed-form shifts diverge at zero detuning")


def rwa_shifts(params: SystemParams) -> ShiftSet:
    """Leading-order shifts for ``g << |Delta| << Sigma``.

    The total shift ``delta_omega_a`` comes out as ``-g**2 / Delta``.
    """
    _require_detuned(params)
    lam, g, d = params.lambda_, params.g, params.delta
    pull = g * g / d
    kerr_pull = lam * g * g / d**2
    return shift_set_from_closure(
        params,
        delta_nm=pull + kerr_pull,
        omega_r_bar=params.omega_r + pull + kerr_pull,
        chi_a=lam * (1 - 2 * g * g / d**2),
        chi_r=0.0,
        chi_ar=kerr_pull,
        route=Route.RWA,
        flags=_validity_flags(params, rwa=True),
    )


def beyond_rwa_shifts(params: SystemParams) -> ShiftSet:
    """Leading-order shifts for ``g << |Delta|`` including counter-rotating terms."""
    _require_detuned(params)
    lam, g = params.lambda_, params.g
    wa, wr, d, s = params.omega_a, params.omega_r, params.delta, params.sigma
    ds2 = (d * s) ** 2
    return shift_set_from_closure(
        params,
        delta_nm=g * g * 2 * wr / (d * s) + 4 * lam * g * g * wr * wa / ds2,
        omega_r_bar=wr + g * g * 2 * wa / (d * s) + 4 * lam * g * g * wa**2 / ds2,
        chi_a=lam * (1 - 4 * g * g * wr * (wa**2 + wr**2) / (wa * ds2)),
        chi_r=0.0,
        chi_ar=4 * lam * g * g * wr**2 / ds2,
        route=Route.BEYOND_RWA,
        flags=_validity_flags(params),
    )


def perturbative_stark_shift(params: SystemParams) -> float:
    """Perturbative cross-Kerr ``lambda g^2 / (Delta (Delta - lambda))``."""
    d = params.delta
    # Delta is a difference of inputs; compare at the rounding scale of that difference
    tiny = 8 * np.finfo(float).eps * params.sigma
    if abs(d) <= tiny or abs(d - params.lambda_) <= tiny:
        raise PoleError(f"Delta = {d!r} is a pole of lambda g^2 / (Delta (Delta - lambda))")
    return params.lambda_ * params.g**2 / (d * (d - params.lambda_))


def jc_dispersive_shift(params: SystemParams) -> float:
    """Two-level-atom dispersive shift ``-g^2 / Delta``."""
    _require_detuned(params)
    return -params.g**2 / params.delta


def transmon_params(circuit: TransmonCircuit) -> tuple[float, float, float]:
    """``(omega_a, lambda, phi_zpf)`` in rad/s, rad/s and Wb."""
    omega_a = 1.0 / np.sqrt(circuit.l_j * circuit.c)
    lambda_ = ELEMENTARY_CHARGE**2 / (2 * circuit.c * HBAR)
    phi_zpf = np.sqrt(HBAR * np.sqrt(circuit.l_j / circuit.c) / 2)
    return float(omega_a), float(lambda_), float(phi_zpf)


TLS_VACUUM_FRACTION = 1.0


def vacuum_fraction(params: SystemParams, route="rwa", cfg=None) -> float:
    """Share ``chi_ar / |delta_omega_a|`` of the total atom shift due to vacuum fluctuations.

    For a two-level atom the share is 1 (``TLS_VACUUM_FRACTION``).
    """
    from .routes import compute_shifts

    shifts = compute_shifts(params, route, cfg)
    if shifts.delta_omega_a == 0:
        raise ZeroShiftError("total shift is zero; the fraction is undefined")
    return shifts.chi_ar / abs(shifts.delta_omega_a)
