"""Dispatch from a route name to the function computing its ShiftSet."""

from __future__ import annotations

from . import analytic, normalmodes
from .hilbert import FockConfig, SystemParams
from .spectrum import Route, ShiftSet, numeric_shifts


def compute_shifts(params: SystemParams, route, cfg: FockConfig | None = None) -> ShiftSet:
    route = Route(route)
    if route is Route.NUMERIC:
        return numeric_shifts(params, cfg or FockConfig())
    if route is Route.NORMAL_MODE:
        return normalmodes.normal_mode_shifts(params)
    if route is Route.RWA:
        return analytic.rwa_shifts(params)
    return analytic.beyond_rwa_shifts(params)
