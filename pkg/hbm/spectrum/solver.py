from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
from numpy.typing import NDArray
from scipy.sparse.linalg import LinearOperator, eigsh, splu

from hbm.common.errors import InputError, SolverError
from hbm.config.numerics import DENSE_MAX_LEVEL, DENSE_MAX_NODES, SOLVER_RTOL
from hbm.spectrum.forms import OperatorForms
from hbm.sphere.operators import even_quotient

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

# eigenvalues this close (relative) belong to one distinct value
DISTINCT_RTOL = 1e-4
ONE_CLUSTER_TOL = {2: 1e-4, 3: 3e-2}
RESIDUAL_LIMIT = 1e3 * SOLVER_RTOL
SHIFT = -1.0


@dataclass(frozen=True, eq=False)
class SpectralReport:
    eigenvalues: Array
    eigenvectors: Array
    even_restricted: bool
    dim: int
    cluster_tol: float
    solver: str
    residual: float
    iterations: int | None = None
    metadata: dict[str, object] = field(default_factory=dict)

    @property
    def lambda0(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def distinct(self) -> list[float]:
        return distinct_values(self.eigenvalues)

    @property
    def one_cluster_size(self) -> int:
        return int(np.sum(np.abs(self.eigenvalues - 1) <= self.cluster_tol))

    @property
    def lambda_above_one(self) -> float | None:
        """First eigenvalue above the 1-cluster (lambda_{n+1} for a full solve)."""
        above = self.eigenvalues[self.eigenvalues > 1 + self.cluster_tol]
        return float(above[0]) if above.size else None

    @property
    def lambda_1e(self) -> float | None:
        """First even eigenvalue past the constant mode."""
        if not self.even_restricted or self.eigenvalues.size < 2:  # noqa: PLR2004
            return None
        return float(self.eigenvalues[1])

    @property
    def p_star(self) -> float | None:
        lam = self.lambda_1e
        if lam is None:
            return None
        return self.dim - (self.dim - 1) * lam

    def to_dict(self) -> dict[str, object]:
        return {
            "eigenvalues": self.eigenvalues,
            "distinct": self.distinct,
            "even_restricted": self.even_restricted,
            "lambda0": self.lambda0,
            "one_cluster_size": self.one_cluster_size,
            "lambda_above_one": self.lambda_above_one,
            "lambda_1e": self.lambda_1e,
            "p_star": self.p_star,
            "solver": self.solver,
            "residual": self.residual,
            "iterations": self.iterations,
            **self.metadata,
        }


def distinct_values(values: Array, rtol: float = DISTINCT_RTOL) -> list[float]:
    groups: list[list[float]] = []
    for value in np.sort(values):
        if groups and abs(value - groups[-1][0]) <= rtol * max(1.0, abs(groups[-1][0])):
            groups[-1].append(float(value))
        else:
            groups.append([float(value)])
    return [float(np.mean(group)) for group in groups]


def _use_dense(forms: OperatorForms, size: int) -> bool:
    if forms.dim == 2:  # noqa: PLR2004
        return size <= DENSE_MAX_NODES
    return forms.grid.resolution <= DENSE_MAX_LEVEL


def _deflation_shift(stiffness: sparse.csr_matrix, mass: Array) -> float:
    """Upper bound for the spectrum, from Gershgorin rows of M^{-1} A, plus one."""
    row_sums = np.asarray(abs(stiffness).sum(axis=1)).reshape(-1)
    return 2 * float(np.max(row_sums / mass)) + 1


def _apply(
    stiffness: sparse.csr_matrix,
    deflation: Array | None,
    vectors: Array,
) -> Array:
    applied = stiffness @ vectors
    if deflation is not None:
        applied = applied + np.multiply.outer(deflation, deflation @ vectors)
    return applied


def _residual(
    stiffness: sparse.csr_matrix,
    deflation: Array | None,
    mass: Array,
    values: Array,
    vectors: Array,
) -> float:
    applied = _apply(stiffness, deflation, vectors)
    norm_a = float(abs(stiffness).sum(axis=1).max())
    if deflation is not None:
        norm_a += float(np.abs(deflation).max() * np.abs(deflation).sum())
    scale = (norm_a + np.abs(values) * mass.max()) * np.linalg.norm(vectors, axis=0)
    error = np.linalg.norm(applied - mass[:, None] * vectors * values, axis=0)
    return float(np.max(error / scale))


def _start_vector(size: int) -> Array:
    return np.ones(size) + 0.01 * np.sin(np.arange(size) + 1.0)


def _solve_dense(
    stiffness: sparse.csr_matrix,
    mass: Array,
    k: int,
    deflation: Array | None,
) -> tuple[Array, Array]:
    dense = stiffness.toarray()
    if deflation is not None:
        dense += np.outer(deflation, deflation)
    return scipy.linalg.eigh(dense, np.diag(mass), subset_by_index=[0, k - 1])


def _solve_shift_invert(
    stiffness: sparse.csr_matrix,
    mass: Array,
    k: int,
    deflation: Array | None,
) -> tuple[Array, Array, int]:
    shifted = (stiffness - SHIFT * sparse.diags(mass)).tocsc()
    factor = splu(shifted)
    applications = 0

    def solve(rhs: Array) -> Array:
        nonlocal applications
        applications += 1
        x = factor.solve(rhs)
        if deflation is None:
            return x
        # Sherman-Morrison for (A - sigma M + u u^t)^{-1}
        y = factor.solve(deflation)
        return x - y * (deflation @ x) / (1 + deflation @ y)

    size = stiffness.shape[0]
    operator = LinearOperator((size, size), matvec=solve, dtype=float)
    matrix = LinearOperator(
        (size, size),
        matvec=lambda x: _apply(stiffness, deflation, x),
        dtype=float,
    )
    values, vectors = eigsh(
        matrix,
        k=k,
        M=sparse.diags(mass, format="csc"),
        sigma=SHIFT,
        which="LM",
        OPinv=operator,
        tol=SOLVER_RTOL,
        v0=_start_vector(size),
    )
    order = np.argsort(values)
    return values[order], vectors[:, order], applications


def solve_spectrum(
    forms: OperatorForms,
    k: int,
    *,
    even_only: bool = False,
    deflate: bool = False,
) -> SpectralReport:
    """k smallest eigenpairs of A z = lambda M z, ascending and mass-normalised.

    ``even_only`` solves on the quotient by antipodal pairs. ``deflate`` shifts the
    constant mode to the top of the spectrum and reports it separately as lambda_0.
    """
    stiffness, mass = forms.stiffness, forms.mass
    lift = None
    if even_only:
        lift = even_quotient(forms.grid)
        stiffness = (lift.T @ stiffness @ lift).tocsr()
        mass = np.asarray(lift.T @ forms.mass).reshape(-1)
    size = stiffness.shape[0]
    wanted = k - 1 if deflate else k
    if not 1 <= k <= size or (deflate and wanted < 1):
        msg = f"cannot compute {k} eigenpairs of a space of dimension {size}"
        raise InputError(msg)

    deflation = None
    if deflate:
        scale = _deflation_shift(stiffness, mass) / float(mass.sum())
        deflation = np.sqrt(scale) * mass

    iterations: int | None = None
    if _use_dense(forms, size):
        solver = "dense"
        values, vectors = _solve_dense(stiffness, mass, wanted, deflation)
    else:
        if wanted >= size - 1:
            msg = f"shift-invert needs fewer than {size - 1} eigenpairs, got {wanted}"
            raise InputError(msg)
        solver = "shift-invert"
        values, vectors, iterations = _solve_shift_invert(
            stiffness,
            mass,
            wanted,
            deflation,
        )

    residual = _residual(stiffness, deflation, mass, values, vectors)
    if residual > RESIDUAL_LIMIT:
        msg = f"{solver} eigensolve did not converge: relative residual {residual:.3e}"
        raise SolverError(msg, residual=residual)

    if deflate:
        constant = np.ones(size) / np.sqrt(mass.sum())
        lambda0 = float(constant @ (stiffness @ constant))
        values = np.concatenate([[lambda0], values])
        vectors = np.column_stack([constant, vectors])
    vectors = vectors / np.sqrt(np.einsum("i,ij,ij->j", mass, vectors, vectors))
    if lift is not None:
        vectors = lift @ vectors

    logger.debug(
        "Solved %d eigenpairs on %s (%s, even=%s): residual %.2e",
        k,
        forms.grid.descriptor,
        solver,
        even_only,
        residual,
    )
    return SpectralReport(
        eigenvalues=values,
        eigenvectors=vectors,
        even_restricted=even_only,
        dim=forms.dim,
        cluster_tol=ONE_CLUSTER_TOL[forms.dim],
        solver=solver,
        residual=residual,
        iterations=iterations,
        metadata={**forms.metadata(), "solver_rtol": SOLVER_RTOL},
    )
