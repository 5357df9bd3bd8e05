"""Symplectic normal-mode route.

The quadratic part of the coupled Hamiltonian is written as ``v^T H v`` with
``v = [a, b, a^dag, b^dag]``. Diagonalizing ``H J`` and normalizing its
eigenvectors symplectically gives ``F`` with ``eta = F^T v`` the normal-mode
operators ``[alpha, beta, alpha^dag, beta^dag]``. Projecting the atom flux
``a + a^dag`` on the normal modes and expanding the quartic term to first order
in the anharmonicity yields the Kerr coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegeneracyError, InstabilityError, NumericFailureError
from .hilbert import SystemParams
from .spectrum import Route, ShiftSet, shift_set_from_closure

STRADDLE_MARGIN = 0.25
EIGEN_TOL = 1e-10
DEGENERACY_TOL = 1e-12

_I2 = np.eye(2)
_Z2 = np.zeros((2, 2))
J = np.block([[_Z2, _I2], [-_I2, _Z2]])
# exchanges the annihilation and creation halves of v
SWAP = np.block([[_Z2, _I2], [_I2, _Z2]])


def quadratic_form(params: SystemParams) -> np.ndarray:
    """4x4 coefficient matrix ``H`` with ``H_hat = v^T H v`` up to constants."""
    wa, wr, g = params.omega_a + params.lambda_, params.omega_r, params.g
    return 0.5 * np.array(
        [
            [0.0, g, wa, -g],
            [g, 0.0, -g, wr],
            [wa, -g, 0.0, g],
            [-g, wr, g, 0.0],
        ]
    )


def lambda_matrix(omega_a_mode: float, omega_r_mode: float) -> np.ndarray:
    """Diagonal-mode coefficient matrix for mode frequencies ``(omega_a_bar + lambda, omega_r_bar)``."""
    lam = np.zeros((4, 4))
    lam[0, 2] = lam[2, 0] = 0.5 * omega_a_mode
    lam[1, 3] = lam[3, 1] = 0.5 * omega_r_mode
    return lam


def exact_frequencies(params: SystemParams) -> tuple[float, float]:
    """Closed-form normal-mode frequencies of the quadratic Hamiltonian.

    Returns ``(omega_a_bar + lambda, omega_r_bar)``: the atom-like value
    reduces to ``omega_a + lambda`` at ``g = 0``. The atom-like branch is the
    lower one when ``omega_a + lambda <= omega_r`` and the upper one otherwise,
    which follows each branch continuously from ``g = 0``.
    """
    wa, wr, g = params.omega_a + params.lambda_, params.omega_r, params.g
    s = wa**2 + wr**2
    root = np.sqrt((wa**2 - wr**2) ** 2 + 16.0 * g**2 * wa * wr)
    product = wa * wr * (wa * wr - 4.0 * g**2)
    if product <= 0:
        raise InstabilityError(
            f"g**2 = {g**2:.6g} is not below (omega_a + lambda) omega_r / 4 = {wa * wr / 4:.6g}"
        )
    upper2 = 0.5 * (s + root)
    # product of the squared roots avoids cancellation in the lower branch
    lower2 = product / upper2
    upper, lower = float(np.sqrt(upper2)), float(np.sqrt(lower2))
    if wa <= wr:
        return lower, upper
    return upper, lower


@dataclass(frozen=True)
class SymplecticTransform:
    """Symplectic matrix ``F = [[A, B], [B, A]]`` and the mode frequencies it diagonalizes.

    ``omega_a_mode`` is the atom-like normal-mode frequency of the quadratic
    Hamiltonian (``omega_a_bar + lambda``); ``omega_a_bar`` subtracts ``lambda``.
    """

    f: np.ndarray
    omega_a_mode: float
    omega_r_bar: float
    lambda_: float = 0.0

    @property
    def omega_a_bar(self) -> float:
        return self.omega_a_mode - self.lambda_

    @property
    def a_block(self) -> np.ndarray:
        return self.f[:2, :2]

    @property
    def b_block(self) -> np.ndarray:
        return self.f[:2, 2:]

    @property
    def inverse(self) -> np.ndarray:
        """``-J F J``: maps normal-mode operators back, ``v = -J F J eta``."""
        return -J @ self.f @ J

    @property
    def lambda_matrix(self) -> np.ndarray:
        return lambda_matrix(self.omega_a_mode, self.omega_r_bar)

    def symplectic_error(self) -> float:
        f = self.f
        return float(max(np.abs(f.T @ J @ f - J).max(), np.abs(f @ J @ f.T - J).max()))


def symplectic_transform(params: SystemParams) -> SymplecticTransform:
    """Normal-mode transform of the quadratic part of the coupled Hamiltonian.

    Columns of ``F`` are eigenvectors of ``H J`` for the eigenvalues
    ``(-w_a/2, -w_r/2, +w_a/2, +w_r/2)`` with ``w_a = omega_a_bar + lambda``.
    Each pair is scaled to unit symplectic norm and the sign is chosen so the
    diagonal of ``F`` is positive, which gives ``F = I`` at ``g = 0``.

    Raises
    ------
    InstabilityError
        Outside the stability bound.
    DegeneracyError
        If the two mode frequencies coincide, so their order is undefined.
    """
    if not params.is_stable:
        raise InstabilityError(
            f"stability ratio 4 g^2 / ((omega_a + lambda) omega_r) = {params.stability_ratio:.6g} >= 1"
        )
    wa, wr = params.omega_a + params.lambda_, params.omega_r
    if params.g == 0.0:
        return SymplecticTransform(np.eye(4), wa, wr, params.lambda_)

    hj = quadratic_form(params) @ J
    evals, evecs = np.linalg.eig(hj)
    scale = max(wa, wr)
    if np.abs(evals.imag).max() > EIGEN_TOL * scale:
        raise InstabilityError(f"H J has complex eigenvalues {evals}")
    evals = evals.real
    order = np.argsort(evals)
    evals = evals[order]
    evecs = evecs[:, order]
    if np.abs(evals + evals[::-1]).max() > EIGEN_TOL * scale:
        raise NumericFailureError(f"eigenvalues of H J are not +/- pairs: {evals}")

    # evals ascending: [-w_hi/2, -w_lo/2, +w_lo/2, +w_hi/2]
    w_hi, w_lo = -2.0 * evals[0], -2.0 * evals[1]
    if w_hi - w_lo <= DEGENERACY_TOL * scale:
        raise DegeneracyError(f"normal-mode frequencies coincide: {w_lo!r}, {w_hi!r}")
    atom_col, res_col = (1, 0) if wa <= wr else (0, 1)

    f = np.zeros((4, 4))
    for k, col in enumerate((atom_col, res_col)):
        u = _real_vector(evecs[:, col])
        norm = u[:2] @ u[:2] - u[2:] @ u[2:]
        if norm <= 0:
            raise NumericFailureError(f"mode {k} has non-positive symplectic norm {norm:.3e}")
        u = u / np.sqrt(norm)
        if u[k] < 0:
            u = -u
        f[:, k] = u
        # partner column for +w/2 is the half-swapped vector
        f[:, k + 2] = SWAP @ u
    w_atom, w_res = (w_lo, w_hi) if wa <= wr else (w_hi, w_lo)
    return SymplecticTransform(f, float(w_atom), float(w_res), params.lambda_)


def _real_vector(v):
    # eigenvectors of real eigenvalues are real up to a global phase
    v = np.asarray(v)
    if np.iscomplexobj(v):
        k = np.argmax(np.abs(v))
        v = v * (np.abs(v[k]) / v[k])
        v = v.real
    return v / np.linalg.norm(v)


def flux_coefficients(t: SymplecticTransform, mode: str = "atom") -> tuple[float, float]:
    """Coefficients ``(c_a, c_r)`` with ``x + x^dag = c_a (alpha + alpha^dag) + c_r (beta + beta^dag)``.

    ``x`` is ``a`` for ``mode="atom"`` and ``b`` for ``mode="resonator"``.
    """
    row = {"atom": 0, "resonator": 1}.get(mode)
    if row is None:
        raise ConfigurationError(f"mode must be 'atom' or 'resonator', got {mode!r}")
    inv = t.inverse[row]
    return float(inv[0] + inv[2]), float(inv[1] + inv[3])


def _ratio(num, window):
    if num == 0:
        return 0.0
    return np.inf if window == 0 else num / window


def straddling_ratio(params: SystemParams) -> float:
    """``lambda / min(|3 omega_a - omega_r|, |omega_a - 3 omega_r|)``."""
    window = min(abs(3 * params.omega_a - params.omega_r), abs(params.omega_a - 3 * params.omega_r))
    return _ratio(params.lambda_, window)


def expansion_flags(params: SystemParams) -> list[str]:
    """Flags for inputs where the first-order Kerr expansion is unreliable.

    ``near_resonance`` when ``lambda >= 0.25 |Delta|``, ``straddling`` when
    ``lambda >= 0.25`` times the distance to ``omega_r = 3 omega_a`` or
    ``omega_a = 3 omega_r``.
    """
    flags = []
    if _ratio(params.lambda_, abs(params.delta)) >= STRADDLE_MARGIN:
        flags.append("near_resonance")
    if straddling_ratio(params) >= STRADDLE_MARGIN:
        flags.append("straddling")
    return flags


def kerr_coefficients(
    params: SystemParams,
    t: SymplecticTransform | None = None,
    mode_shapes: str = "bare",
) -> ShiftSet:
    """First-order-in-``lambda`` shift decomposition in the normal-mode basis.

    ``chi_a = lambda c_a**4``, ``chi_r = lambda c_r**4`` and
    ``chi_ar = lambda c_a**2 c_r**2``. Mode frequencies, and hence
    ``delta_nm``, come from ``t``. The flux projection uses the mode shapes at
    ``lambda = 0`` by default (``mode_shapes="bare"``), which keeps the Kerr
    terms consistently first order in ``lambda``; ``"dressed"`` projects with
    ``t`` itself. Close to the stability bound, where only the
    ``lambda``-shifted quadratic form is stable, ``"bare"`` falls back to the
    dressed shapes and adds the flag ``"dressed_shapes"``.

    Inputs outside the expansion's validity carry the flags of
    ``expansion_flags``; they are not rejected.
    """
    if t is None:
        t = symplectic_transform(params)
    if mode_shapes not in ("bare", "dressed"):
        raise ConfigurationError(f"mode_shapes must be 'bare' or 'dressed', got {mode_shapes!r}")
    flags = expansion_flags(params)
    harmonic = params.replace(lambda_=0.0)
    shapes = t
    if mode_shapes == "bare" and params.lambda_ > 0:
        if harmonic.is_stable:
            shapes = symplectic_transform(harmonic)
        else:
            # only the lambda-shifted quadratic form is stable here
            flags.append("dressed_shapes")
    c_a, c_r = flux_coefficients(shapes)
    lam = params.lambda_
    return shift_set_from_closure(
        params,
        delta_nm=params.omega_a - t.omega_a_bar,
        omega_r_bar=t.omega_r_bar,
        chi_a=lam * c_a**4,
        chi_r=lam * c_r**4,
        chi_ar=lam * c_a**2 * c_r**2,
        route=Route.NORMAL_MODE,
        flags=flags,
    )


def normal_mode_shifts(params: SystemParams, mode_shapes: str = "bare") -> ShiftSet:
    return kerr_coefficients(params, symplectic_transform(params), mode_shapes=mode_shapes)
