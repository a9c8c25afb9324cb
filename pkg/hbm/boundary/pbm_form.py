from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray

from hbm.boundary.planar import BoundaryKind, PlanarBoundary
from hbm.common.errors import InputError

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

EVEN_RTOL = 1e-8


def _periodic_derivative(values: Array) -> Array:
    size = len(values)
    frequencies = np.fft.rfftfreq(size, d=1 / size)
    if size % 2 == 0:
        frequencies[-1] = 0.0
    return np.fft.irfft(1j * frequencies * np.fft.rfft(values), n=size)


def pbm_boundary_form_margin(boundary: PlanarBoundary, psi: Array, p: float) -> float:
    """Boundary form of local p-BM for one even trace Psi on a smooth planar body.

    In the Weingarten angle phi, with rho = h'' + h the radius of curvature,

        int <II^{-1} grad Psi, grad Psi> - int H Psi^2 - (1 - p) int Psi^2 / <x, nu>
          = int Psi_phi^2 dphi - int Psi^2 dphi - (1 - p) int Psi^2 rho / h dphi.

    Psi is first made mean-zero by subtracting lambda <x, nu>, which leaves the form
    unchanged. A nonnegative margin certifies the inequality for this Psi.
    """
    smooth = boundary.kind is BoundaryKind.SMOOTH
    if not smooth or boundary.rho is None or boundary.h is None:
        msg = "the boundary form needs a smooth body with Weingarten samples"
        raise InputError(msg)
    psi = np.asarray(psi, dtype=float)
    size = len(boundary.weights)
    if psi.shape != (size,):
        msg = f"Psi has shape {psi.shape}, expected ({size},)"
        raise InputError(msg)
    if size % 2:
        msg = f"evenness needs an even number of samples, got {size}"
        raise InputError(msg)
    odd = np.abs(psi - np.roll(psi, size // 2)).max()
    if odd > EVEN_RTOL * max(1.0, np.abs(psi).max()):
        msg = f"Psi is not even: |Psi(x) - Psi(-x)| reaches {odd:.3e}"
        raise InputError(msg)

    h, rho = boundary.h, boundary.rho
    step = 2 * np.pi / size
    shift = float(psi @ rho) / float(h @ rho)
    psi = psi - shift * h

    derivative = _periodic_derivative(psi)
    curvature = (1 - p) * (psi**2 @ (rho / h))
    margin = step * float(derivative @ derivative - psi @ psi - curvature)
    logger.debug(
        "p-BM boundary form margin %.12g at p=%g (centring shift %.3e)",
        margin,
        p,
        shift,
    )
    return margin
