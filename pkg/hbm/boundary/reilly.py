"""Numerical check of the Reilly identity on the unit disk and the square [-1, 1]^2.

    int_K (Lap u)^2 = int_K |Hess u|^2 + int_dK H u_nu^2 + int_dK II(grad_d u, grad_d u)
                      - 2 int_dK <grad_d u_nu, grad_d u>

On the square the faces are flat, and each vertex carries the limit of a rounded
corner: the integral of u_nu^2 - u_tau^2 over the turning angle of the normal.
"""

from __future__ import annotations

import logging
import math
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from hbm.boundary.harmonic import Polynomial2D
from hbm.boundary.planar import gauss_unit
from hbm.common.errors import InputError

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

MAX_DEGREE = 10
SQUARE = np.array([[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]])


class ReillyDomain(str, Enum):
    DISK = "disk"
    SQUARE = "square"


def _interior_terms(
    u: Polynomial2D,
    points: Array,
    weights: Array,
) -> tuple[float, float]:
    hessian = u.hessian(points)
    laplacian = np.trace(hessian, axis1=-2, axis2=-1)
    squared_norm = np.einsum("pab,pab->p", hessian, hessian)
    return float(weights @ laplacian**2), float(weights @ squared_norm)


def _disk_sides(u: Polynomial2D, degree: int) -> tuple[float, float]:
    radial, radial_weights = gauss_unit(degree + 1)
    angles = 2 * math.pi * np.arange(4 * (degree + 1)) / (4 * (degree + 1))
    angle_weight = 2 * math.pi / len(angles)
    circle = np.column_stack([np.cos(angles), np.sin(angles)])

    points = (radial[:, None, None] * circle[None, :, :]).reshape(-1, 2)
    weights = np.repeat(radial * radial_weights * angle_weight, len(angles))
    lhs, hessian_term = _interior_terms(u, points, weights)

    tangents = np.column_stack([-circle[:, 1], circle[:, 0]])
    gradient = u.gradient(circle)
    hessian = u.hessian(circle)
    normal = np.einsum("si,si->s", gradient, circle)
    tangential = np.einsum("si,si->s", gradient, tangents)
    # d/dtau <grad u, x> = <Hess u tau, x> + u_tau on the unit circle
    normal_derivative = np.einsum("si,sij,sj->s", circle, hessian, tangents) + tangential
    boundary = normal**2 + tangential**2 - 2 * tangential * normal_derivative
    return lhs, hessian_term + angle_weight * float(boundary.sum())


def _corner(gradient: Array, start: float, stop: float) -> float:
    a, b = gradient
    return (a**2 - b**2) * (math.sin(2 * stop) - math.sin(2 * start)) / 2 - a * b * (
        math.cos(2 * stop) - math.cos(2 * start)
    )


def _square_sides(u: Polynomial2D, degree: int) -> tuple[float, float]:
    nodes, node_weights = gauss_unit(degree + 1)
    nodes, node_weights = 2 * nodes - 1, 2 * node_weights
    x, y = np.meshgrid(nodes, nodes, indexing="ij")
    points = np.column_stack([x.ravel(), y.ravel()])
    weights = np.outer(node_weights, node_weights).ravel()
    lhs, hessian_term = _interior_terms(u, points, weights)

    faces = 0.0
    edges = np.roll(SQUARE, -1, axis=0) - SQUARE
    lengths = np.linalg.norm(edges, axis=1)
    angles = []
    for start, edge, length in zip(SQUARE, edges, lengths, strict=True):
        tangent = edge / length
        normal = np.array([tangent[1], -tangent[0]])
        angles.append(math.atan2(normal[1], normal[0]))
        samples = start + (nodes[:, None] + 1) / 2 * edge
        gradient = u.gradient(samples)
        hessian = u.hessian(samples)
        tangential = gradient @ tangent
        normal_derivative = np.einsum("i,sij,j->s", tangent, hessian, normal)
        faces += length / 2 * float(node_weights @ (tangential * normal_derivative))

    corners = 0.0
    for index, vertex in enumerate(SQUARE):
        incoming = angles[index - 1]
        turn = (angles[index] - incoming) % (2 * math.pi)
        corners += _corner(u.gradient(vertex)[0], incoming, incoming + turn)
    return lhs, hessian_term - 2 * faces + corners


def reilly_sides(domain: ReillyDomain | str, u: Polynomial2D) -> tuple[float, float]:
    """Left and right sides of the identity, by quadrature exact for degree <= 10."""
    try:
        domain = ReillyDomain(domain)
    except ValueError as exc:
        msg = f"unknown Reilly domain {domain!r}; expected disk or square"
        raise InputError(msg) from exc
    degree = max(u.degree, 2)
    if degree > MAX_DEGREE:
        msg = f"polynomial degree {u.degree} exceeds {MAX_DEGREE}"
        raise InputError(msg)
    if domain is ReillyDomain.DISK:
        return _disk_sides(u, degree)
    return _square_sides(u, degree)


def reilly_residual(domain: ReillyDomain | str, u: Polynomial2D) -> float:
    lhs, rhs = reilly_sides(domain, u)
    logger.debug(
        "Reilly on %s for %s: lhs=%.15g rhs=%.15g",
        domain,
        u.describe(),
        lhs,
        rhs,
    )
    return abs(lhs - rhs)
