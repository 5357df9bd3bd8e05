"""Truncated Fock-space matrices for a weakly-anharmonic atom and a resonator.

Matrices are dense, real and symmetric. For the coupled system the basis is
the tensor product ``|n_a> (x) |n_r>`` with the atom index varying slowest,
i.e. row ``n_a * n_res + n_r``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, InvalidDimensionError

DEFAULT_TRUNCATION = 15
MIN_TRUNCATION = 4


@dataclass(frozen=True)
class SystemParams:
    """Bare model parameters, all angular frequencies in one common unit.

    Parameters
    ----------
    omega_a : float
        Frequency of the first atomic transition.
    omega_r : float
        Resonator frequency.
    lambda_ : float
        Anharmonicity (``lambda`` is a keyword, hence the underscore).
    g : float
        Coupling strength.
    """

    omega_a: float
    omega_r: float
    lambda_: float
    g: float

    def __post_init__(self):
        for name in ("omega_a", "omega_r", "lambda_", "g"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ConfigurationError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.omega_a <= 0 or self.omega_r <= 0:
            raise ConfigurationError("omega_a and omega_r must be positive")
        if self.lambda_ < 0 or self.g < 0:
            raise ConfigurationError("lambda and g must be non-negative")

    @property
    def delta(self) -> float:
        return self.omega_r - self.omega_a

    @property
    def sigma(self) -> float:
        return self.omega_a + self.omega_r

    @property
    def delta_p(self) -> float:
        return self.delta - self.lambda_

    @property
    def sigma_p(self) -> float:
        return self.sigma + self.lambda_

    @property
    def stability_ratio(self) -> float:
        """``4 g**2 / ((omega_a + lambda) omega_r)``; the system is stable below 1."""
        return 4.0 * self.g**2 / ((self.omega_a + self.lambda_) * self.omega_r)

    @property
    def is_stable(self) -> bool:
        return self.stability_ratio < 1.0

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def scaled(self, unit: float) -> "SystemParams":
        """All four frequencies divided by ``unit``."""
        return SystemParams(
            self.omega_a / unit, self.omega_r / unit, self.lambda_ / unit, self.g / unit
        )

    @classmethod
    def from_detuning(cls, delta, lambda_, g, omega_a=1.0) -> "SystemParams":
        return cls(omega_a, omega_a + delta, lambda_, g)


@dataclass(frozen=True)
class FockConfig:
    n_atom: int = DEFAULT_TRUNCATION
    n_res: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        for name in ("n_atom", "n_res"):
            value = getattr(self, name)
            if int(value) != value or value < MIN_TRUNCATION:
                raise InvalidDimensionError(
                    f"{name} must be an integer >= {MIN_TRUNCATION}, got {value!r}"
                )
            object.__setattr__(self, name, int(value))

    @property
    def dim(self) -> int:
        return self.n_atom * self.n_res

    def index(self, n_a: int, n_r: int) -> int:
        """Row of the bare state ``|n_a, n_r>`` in the tensor basis."""
        if not (0 <= n_a < self.n_atom and 0 <= n_r < self.n_res):
            raise InvalidDimensionError(f"label ({n_a}, {n_r}) outside {self}")
        return n_a * self.n_res + n_r

    def doubled(self) -> "FockConfig":
        return FockConfig(2 * self.n_atom, 2 * self.n_res)


def ladder_ops(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation matrices in an ``n``-level Fock space."""
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"truncation must be a positive integer, got {n!r}")
    a = np.diag(np.sqrt(np.arange(1, int(n), dtype=float)), k=1)
    return a, a.T.copy()


def _quartic(n: int) -> np.ndarray:
    # (a + a^dag)^4 by explicit matrix power; the top ~4 levels carry truncation error
    a, ad = ladder_ops(n)
    x = a + ad
    x2 = x @ x
    return x2 @ x2


def _atom_part(omega, lambda_, n):
    a, ad = ladder_ops(n)
    return omega * (ad @ a) - (lambda_ / 12.0) * _quartic(n)


def isolated_hamiltonian(params: SystemParams, n: int) -> np.ndarray:
    """``omega_a (a^dag a + 1/2) - (lambda/12) (a + a^dag)^4`` on ``n`` levels.

    The zero-point term is kept.
    """
    if int(n) != n or n < MIN_TRUNCATION:
        raise InvalidDimensionError(f"isolated atom needs n >= {MIN_TRUNCATION}, got {n!r}")
    h = _atom_part(params.omega_a, params.lambda_, n) + 0.5 * params.omega_a * np.eye(n)
    return _symmetrize(h)


def coupled_hamiltonian(params: SystemParams, cfg: FockConfig = FockConfig()) -> np.ndarray:
    """Atom-resonator Hamiltonian without ground-state constants.

    ``(omega_a + lambda) a^dag a - (lambda/12)(a + a^dag)^4 + omega_r b^dag b
    + g (a - a^dag)(b - b^dag)``. The atom number operator carries
    ``omega_a + lambda`` so that ``omega_a`` is the first atomic transition to
    first order in ``lambda``.
    """
    na, nr = cfg.n_atom, cfg.n_res
    a, ad = ladder_ops(na)
    b, bd = ladder_ops(nr)
    h_atom = _atom_part(params.omega_a + params.lambda_, params.lambda_, na)
    h = np.kron(h_atom, np.eye(nr))
    h += np.kron(np.eye(na), params.omega_r * (bd @ b))
    if params.g:
        h += params.g * np.kron(a - ad, b - bd)
    return _symmetrize(h)


def _symmetrize(h):
    # exact symmetry by construction; averaging removes round-off asymmetry of the matrix power
    return 0.5 * (h + h.T)
