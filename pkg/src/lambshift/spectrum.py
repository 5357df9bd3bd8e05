"""Numerical route: diagonalize the coupled Hamiltonian and read shifts off
the labeled dressed spectrum."""

from __future__ import annotations

import enum
import logging
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import AmbiguousLabelError, ConfigurationError, NumericFailureError, ResourceLimitError
from .hilbert import FockConfig, SystemParams, coupled_hamiltonian

log = logging.getLogger(__name__)

EIGEN_RTOL = 1e-10
LABEL_THRESHOLD = 0.5
DEFAULT_MAX_DIM = 4096

SHIFT_FIELDS = (
    "omega_a_bar",
    "omega_r_bar",
    "delta_nm",
    "chi_a",
    "chi_r",
    "chi_ar",
    "delta_omega_a",
)


class Route(str, enum.Enum):
    NUMERIC = "numeric"
    NORMAL_MODE = "normal_mode"
    RWA = "rwa"
    BEYOND_RWA = "beyond_rwa"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ShiftSet:
    """Decomposition of the atom and resonator frequency shifts.

    ``delta_nm`` is the normal-mode-splitting shift of the atom
    (``omega_a_bar = omega_a - delta_nm``), ``chi_a`` / ``chi_r`` are the
    self-Kerr coefficients, ``2 * chi_ar`` the cross-Kerr (AC Stark shift per
    photon) and ``delta_omega_a = lambda - delta_nm - chi_a - chi_ar`` the
    total shift of the first atomic transition with the resonator empty.
    """

    omega_a_bar: float
    omega_r_bar: float
    delta_nm: float
    chi_a: float
    chi_r: float
    chi_ar: float
    delta_omega_a: float
    route: Route
    flags: frozenset = field(default_factory=frozenset)

    @property
    def omega_a(self) -> float:
        return self.omega_a_bar + self.delta_nm

    @property
    def atom_transition(self) -> float:
        """First atomic transition with the resonator in its ground state."""
        return self.omega_a + self.delta_omega_a

    @property
    def resonator_transition(self) -> float:
        """First resonator transition with the atom in its ground state."""
        return self.omega_r_bar - self.chi_r - self.chi_ar

    def closure_residual(self, lambda_: float) -> float:
        return self.delta_omega_a - (lambda_ - self.delta_nm - self.chi_a - self.chi_ar)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["route"] = self.route.value
        d["flags"] = sorted(self.flags)
        return d


def shift_set_from_closure(params, delta_nm, omega_r_bar, chi_a, chi_r, chi_ar, route, flags=()):
    """Build a ShiftSet whose total shift is fixed by the closure identity."""
    delta_omega_a = params.lambda_ - delta_nm - chi_a - chi_ar
    return ShiftSet(
        omega_a_bar=params.omega_a - delta_nm,
        omega_r_bar=omega_r_bar,
        delta_nm=delta_nm,
        chi_a=chi_a,
        chi_r=chi_r,
        chi_ar=chi_ar,
        delta_omega_a=delta_omega_a,
        route=Route(route),
        flags=frozenset(flags),
    )


class Level(NamedTuple):
    n_a: int
    n_r: int
    energy: float
    overlap: float


@dataclass(frozen=True)
class LabeledSpectrum:
    params: SystemParams | None
    cfg: FockConfig
    levels: tuple[Level, ...]

    def __post_init__(self):
        object.__setattr__(self, "_index", {(lv.n_a, lv.n_r): lv for lv in self.levels})

    def level(self, n_a: int, n_r: int) -> Level:
        try:
            return self._index[(n_a, n_r)]
        except KeyError:
            raise KeyError(f"label ({n_a}, {n_r}) was not requested when labeling") from None

    def energy(self, n_a: int, n_r: int) -> float:
        return self.level(n_a, n_r).energy

    @property
    def min_overlap(self) -> float:
        return min(lv.overlap for lv in self.levels)


def diagonalize(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric matrix."""
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ConfigurationError(f"expected a square matrix, got shape {h.shape}")
    if not np.array_equal(h, h.T):
        raise ConfigurationError("matrix is not symmetric")
    try:
        evals, evecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError(f"eigensolver did not converge: {exc}") from exc

    scale = max(np.abs(h).max(), np.finfo(float).tiny)
    residual = np.abs(h @ evecs - evecs * evals).max() / scale
    ortho = np.abs(evecs.T @ evecs - np.eye(len(evals))).max()
    if residual > EIGEN_RTOL or ortho > EIGEN_RTOL:
        raise NumericFailureError(
            f"eigendecomposition residual {residual:.3e}, orthogonality error {ortho:.3e}",
            residual=max(residual, ortho),
        )
    return evals, evecs


def label_states(
    spec: tuple[np.ndarray, np.ndarray],
    cfg: FockConfig,
    max_n: int = 2,
    params: SystemParams | None = None,
    threshold: float = LABEL_THRESHOLD,
) -> LabeledSpectrum:
    """Attribute dressed eigenstates to bare labels ``(n_a, n_r)``, ``n_a + n_r <= max_n``.

    Assignment is greedy by descending overlap ``|<n_a, n_r|v>|**2`` with each
    eigenvector used at most once.

    Raises
    ------
    AmbiguousLabelError
        If some requested label ends up with an overlap below ``threshold``.
    """
    evals, evecs = spec
    labels = [
        (n_a, n_r)
        for n_a in range(min(max_n, cfg.n_atom - 1) + 1)
        for n_r in range(min(max_n - n_a, cfg.n_res - 1) + 1)
    ]
    rows = np.array([cfg.index(*lab) for lab in labels])
    overlaps = evecs[rows, :] ** 2

    order = np.argsort(-overlaps, axis=None, kind="stable")
    assigned: dict[int, int] = {}
    used: set[int] = set()
    for flat in order:
        li, ei = divmod(int(flat), overlaps.shape[1])
        if li in assigned or ei in used:
            continue
        assigned[li] = ei
        used.add(ei)
        if len(assigned) == len(labels):
            break

    levels = []
    for li, (n_a, n_r) in enumerate(labels):
        ei = assigned[li]
        ov = float(overlaps[li, ei])
        if ov < threshold:
            raise AmbiguousLabelError(
                f"state ({n_a}, {n_r}) has maximal overlap {ov:.3f} < {threshold}; "
                "dressed states are strongly hybridized",
                label=(n_a, n_r),
                overlap=ov,
            )
        levels.append(Level(n_a, n_r, float(evals[ei]), ov))
    return LabeledSpectrum(params=params, cfg=cfg, levels=tuple(levels))


def labeled_spectrum(params: SystemParams, cfg: FockConfig = FockConfig(), max_n: int = 2) -> LabeledSpectrum:
    return label_states(diagonalize(coupled_hamiltonian(params, cfg)), cfg, max_n, params=params)


def numeric_shifts(params: SystemParams, cfg: FockConfig = FockConfig()) -> ShiftSet:
    """Shift decomposition extracted from the exact (truncated) spectrum.

    The cross-Kerr is half the change of the atom transition when one photon
    is added to the resonator. ``delta_nm`` is not measured independently; it
    follows from the closure identity.
    """
    spec = labeled_spectrum(params, cfg, max_n=2)
    e = spec.energy
    atom_01 = e(1, 0) - e(0, 0)
    res_01 = e(0, 1) - e(0, 0)
    chi_ar = (atom_01 - (e(1, 1) - e(0, 1))) / 2.0
    chi_a = 2.0 * e(1, 0) - e(0, 0) - e(2, 0)
    chi_r = 2.0 * e(0, 1) - e(0, 0) - e(0, 2)
    delta_omega_a = atom_01 - params.omega_a
    delta_nm = params.lambda_ - chi_a - chi_ar - delta_omega_a
    return ShiftSet(
        omega_a_bar=params.omega_a - delta_nm,
        omega_r_bar=res_01 + chi_r + chi_ar,
        delta_nm=delta_nm,
        chi_a=chi_a,
        chi_r=chi_r,
        chi_ar=chi_ar,
        delta_omega_a=delta_omega_a,
        route=Route.NUMERIC,
    )


def converge(
    params: SystemParams,
    cfg0: FockConfig = FockConfig(),
    tol: float = 1e-10,
    max_dim: int = DEFAULT_MAX_DIM,
) -> tuple[ShiftSet, FockConfig]:
    """Double both truncations until no shift changes by ``tol * omega_a``.

    Returns the result at the smaller of the two agreeing truncations, which
    the larger one certifies.
    """
    if not tol > 0:
        raise ConfigurationError(f"tol must be positive, got {tol!r}")
    if cfg0.dim > max_dim:
        raise ResourceLimitError(f"initial dimension {cfg0.dim} exceeds ceiling {max_dim}")
    cfg = cfg0
    current = numeric_shifts(params, cfg)
    while True:
        nxt_cfg = cfg.doubled()
        if nxt_cfg.dim > max_dim:
            raise ResourceLimitError(
                f"not converged to {tol:g} at {cfg.n_atom}x{cfg.n_res}; "
                f"next dimension {nxt_cfg.dim} exceeds ceiling {max_dim}"
            )
        nxt = numeric_shifts(params, nxt_cfg)
        change = max(abs(getattr(current, f) - getattr(nxt, f)) for f in SHIFT_FIELDS)
        log.debug("truncation %dx%d -> %dx%d: max change %.3e", cfg.n_atom, cfg.n_res,
                  nxt_cfg.n_atom, nxt_cfg.n_res, change)
        if change < tol * params.omega_a:
            return current, cfg
        cfg, current = nxt_cfg, nxt
