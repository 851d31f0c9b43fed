"""Stationary diffusion-with-decay solver on the unit-spaced lattice.

Solves ``D * lap(u) - gamma * u + S = 0`` with the standard 5-point Laplacian
and ``u = 0`` on the outermost pixel ring. In ``fixed`` mode the pixels of
each source disk are held at the source intensity and eliminated from the
unknowns (``S = 0``); in ``flux`` mode the rendered input is the source term
``S`` and only the boundary ring is fixed.
"""
import logging

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, spsolve

from .config import SolverConfig
from .exceptions import SolverNonConvergence, StabilityBoundViolation
from .lattice import render_input
from .types import FieldGrid, PhysicsConfig, ScenarioParams

logger = logging.getLogger(__name__)

_NEIGHBOURS = ((-1, 0), (1, 0), (0, -1), (0, 1))

def fixed_values(input: FieldGrid, mode: str) -> tuple[np.ndarray, np.ndarray]:
    """Mask of Dirichlet pixels and the values they are held at.

    The boundary ring is absorbing and takes precedence over a source pixel
    that touches it.
    """
    fixed = np.zeros(input.shape, dtype=bool)
    values = np.zeros(input.shape, dtype=np.float64)
    if mode == "fixed":
        fixed |= input > 0
        values[fixed] = input[fixed]
    fixed[0, :] = fixed[-1, :] = fixed[:, 0] = fixed[:, -1] = True
    values[0, :] = values[-1, :] = values[:, 0] = values[:, -1] = 0.0
    return fixed, values

def assemble_system(
    input: FieldGrid,
    physics: PhysicsConfig,
    mode: str = "fixed",
) -> tuple[sp.csr_matrix, np.ndarray, np.ndarray, np.ndarray]:
    """Assemble the SPD system over the free pixels.

    Returns:
        tuple: ``(A, b, free, base)`` where ``free`` masks the unknown pixels in
        row-major order and ``base`` holds the fixed values (zero on free pixels)
    """
    fixed, base = fixed_values(input, mode)
    free = ~fixed
    index = np.full(input.shape, -1, dtype=np.int64)
    rows, cols = np.nonzero(free)
    m = rows.size
    index[rows, cols] = np.arange(m)

    diag = 4.0 * physics.D + physics.gamma
    assert diag > physics.D * 4.0, "decay rate must keep the system positive definite"

    a_rows = [np.arange(m)]
    a_cols = [np.arange(m)]
    a_data = [np.full(m, diag)]
    b = np.zeros(m, dtype=np.float64)
    if mode == "flux":
        b += input[rows, cols]
    for dr, dc in _NEIGHBOURS:
        # free pixels are interior, so every neighbour is on the lattice
        nb = index[rows + dr, cols + dc]
        coupled = nb >= 0
        a_rows.append(np.arange(m)[coupled])
        a_cols.append(nb[coupled])
        a_data.append(np.full(int(coupled.sum()), -physics.D))
        b[~coupled] += physics.D * base[rows[~coupled] + dr, cols[~coupled] + dc]

    A = sp.csr_matrix(
        (np.concatenate(a_data), (np.concatenate(a_rows), np.concatenate(a_cols))),
        shape=(m, m),
    )
    return A, b, free, base

def _relative_residual(A: sp.csr_matrix, x: np.ndarray, b: np.ndarray) -> float:
    r = np.linalg.norm(b - A @ x)
    scale = np.linalg.norm(b)
    return float(r / scale) if scale > 0 else float(r)

def solve_input(input: FieldGrid, physics: PhysicsConfig, cfg: SolverConfig) -> tuple[FieldGrid, float, int]:
    """Solve the steady state for a rendered input image.

    Returns:
        tuple: ``(field, relative_residual, iterations)``

    Raises:
        SolverNonConvergence: If the residual exceeds ``cfg.tolerance``
    """
    A, b, free, base = assemble_system(input, physics, cfg.mode)
    iterations = 0
    if not np.any(b):
        x = np.zeros_like(b)
    elif cfg.method == "direct-sparse":
        x = spsolve(A.tocsc(), b)
        iterations = 1
    else:
        jacobi = sp.diags(1.0 / A.diagonal())

        def count(_):
            nonlocal iterations
            iterations += 1

        # tighter than the contract so the true residual clears it
        x, info = cg(A, b, rtol=cfg.tolerance * 0.1, atol=0.0, maxiter=cfg.max_iterations,
                     M=jacobi, callback=count)
        if info < 0:
            raise SolverNonConvergence(float("nan"), iterations)
    residual = _relative_residual(A, x, b)
    if residual > cfg.tolerance:
        raise SolverNonConvergence(residual, iterations)
    field = base.copy()
    field[free] = x
    logger.debug("steady state solved: %d unknowns, %d iterations, residual %.2e", b.size, iterations, residual)
    return field, residual, iterations

def solve_steady_state(
    params: ScenarioParams,
    physics: PhysicsConfig,
    cfg: SolverConfig,
    size: int,
    allow_overlap: bool = False,
) -> FieldGrid:
    """Stationary field of a two-source scenario.

    Args:
        params: Scenario parameters
        physics: Diffusivity and decay rate
        cfg: Solver settings
        size: Lattice side length in pixels
        allow_overlap: Accept overlapping source disks

    Returns:
        FieldGrid: The ``size`` x ``size`` steady state (float64)

    Raises:
        SolverNonConvergence: If the residual bound is missed within ``max_iterations``
    """
    field, _, _ = solve_input(render_input(params, size, allow_overlap), physics, cfg)
    return field

def relative_residual(field: FieldGrid, input: FieldGrid, physics: PhysicsConfig, mode: str = "fixed") -> float:
    """Relative residual ||Au - b|| / ||b|| of a candidate field."""
    A, b, free, _ = assemble_system(input, physics, mode)
    return _relative_residual(A, field[free], b)

def pointwise_residual(field: FieldGrid, input: FieldGrid, physics: PhysicsConfig, mode: str = "fixed") -> FieldGrid:
    """``D * lap(u) - gamma * u + S`` on free pixels, zero on fixed ones."""
    fixed, _ = fixed_values(input, mode)
    lap = np.zeros_like(field)
    lap[1:-1, 1:-1] = (field[:-2, 1:-1] + field[2:, 1:-1] + field[1:-1, :-2] + field[1:-1, 2:]
                       - 4.0 * field[1:-1, 1:-1])
    res = physics.D * lap - physics.gamma * field
    if mode == "flux":
        res = res + input
    res[fixed] = 0.0
    return res

def stability_bound(physics: PhysicsConfig) -> float:
    return 1.0 / (4.0 * physics.D + physics.gamma)

def time_step_oracle(
    params: ScenarioParams,
    physics: PhysicsConfig,
    size: int,
    dt: float,
    stop_tol: float,
    mode: str = "fixed",
    max_steps: int = 5_000_000,
) -> FieldGrid:
    """Forward-Euler relaxation of du/dt = D lap(u) - gamma u (+ S) to steady state.

    An independent, slow reference for ``solve_steady_state``: iterates until
    successive iterates differ by less than ``stop_tol`` in max norm.

    Raises:
        StabilityBoundViolation: If ``dt`` is not below 1 / (4D + gamma)
        SolverNonConvergence: If ``max_steps`` pass without meeting ``stop_tol``
    """
    bound = stability_bound(physics)
    if not 0 < dt < bound:
        raise StabilityBoundViolation(dt, bound)
    input = render_input(params, size, allow_overlap=True)
    fixed, base = fixed_values(input, mode)
    u = base.copy()
    for step in range(1, max_steps + 1):
        du = dt * pointwise_residual(u, input, physics, mode)
        du[fixed] = 0.0
        u += du
        change = float(np.max(np.abs(du)))
        if change < stop_tol:
            logger.debug("time-step oracle settled after %d steps", step)
            return u
    raise SolverNonConvergence(change / dt, max_steps)
