"""
Epsilon-dependent spectrum of the per-mode block operator.

At degree l the linearized system acts on pairs (phi, c), where phi is the
radial nutrient perturbation (vanishing at r = 1) and c the boundary
amplitude:

    lambda phi = eps^-1 L_l phi + sigma_s'(1) F_l^(r) (j_l[phi] + b_l c)
    lambda c   = j_l[phi] + b_l c

with L_l = d2 + (2/r) d - l(l+1)/r^2 - f'(sigma_s), F_l^ the regular kernel
with boundary value 1, j_l the boundary velocity generated by the growth
source g'(sigma_s) phi, and b_l the boundary multiplier at gamma.

The slow eigenvalue, which stays O(1) as eps -> 0, is found by eliminating
phi, which leaves the scalar equation

    lambda = b_l + lambda eps sigma_s'(1) j_l[(eps lambda - L_l)^-1 F_l^].

The dense eigensolver locates it and the scalar equation polishes it; the
stiff part of the matrix has norm O(eps^-1 n^4) and would otherwise limit
its accuracy.
"""

import logging
import os
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import root_scalar
from scipy.stats import linregress

from ..errors import ConfigurationError, EigenSolverError, ThresholdUndefinedError
from ..models.profiles import EpsilonSpectrumReport, ModalBlockOperator, StationaryState
from ..models.summary import EpsilonThreshold, SpectralSummary
from .spectrum import bgamma_multiplier, solve_mode_profile, spectral_summary
from .stationary import refine_state
from .stokes import modal_J

logger = logging.getLogger(__name__)

DEFAULT_INTERIOR_NODES = 96
DEFAULT_EPSILON_GRID = (1e-6, 1.0, 40)
DEFAULT_BISECTION_STEPS = 20
IMAG_TOL = 1e-9
ZERO_MODE_TOL = 1e-6

_lock = threading.Lock()
_states: Dict[Tuple, StationaryState] = {}
_j_rows: Dict[Tuple, np.ndarray] = {}


def _state_key(state: StationaryState) -> Tuple:
    return (
        state.f.spec.model_dump_json(),
        state.f.scale,
        state.g.spec.model_dump_json(),
        state.g.scale,
        state.gamma,
    )


def clear_caches() -> None:
    """Drop cached modal states and j_l rows."""
    with _lock:
        _states.clear()
        _j_rows.clear()


def _modal_state(state: StationaryState, n_interior: int) -> StationaryState:
    if state.radius != 1.0:
        raise ConfigurationError("modal operators need a unit-ball stationary state")
    if n_interior < 15:
        raise ConfigurationError(f"need at least 15 interior nodes, got {n_interior}")
    key = (n_interior,) + _state_key(state)
    with _lock:
        cached = _states.get(key)
    if cached is None:
        cached = refine_state(state, n_interior + 1)
        with _lock:
            _states.setdefault(key, cached)
    return cached


def _j_row(l: int, state: StationaryState) -> np.ndarray:
    """j_l applied to the Lagrange basis of the interior nodes."""
    key = (l, state.grid.n) + _state_key(state)
    with _lock:
        row = _j_rows.get(key)
    if row is None:
        basis = np.eye(state.grid.n)[:, :-1]
        row = np.asarray(modal_J(l, basis, state), dtype=float)
        with _lock:
            _j_rows.setdefault(key, row)
        logger.debug("assembled j_l row for l=%d on %d nodes", l, state.grid.n)
    return row


def pi0_modal_kernel(l: int, state: StationaryState) -> np.ndarray:
    """
    Regular solution of [d2 + (2/r) d - l(l+1)/r^2 - f'(sigma_s)] u = 0 with u(1) = 1.

    Args:
        l: Degree
        state: Unit-ball stationary state (its grid is used)

    Returns:
        Kernel values at the grid nodes
    """
    if l < 0:
        raise ConfigurationError(f"degree must be nonnegative, got {l}")
    return solve_mode_profile(l, state.f.derivative(state.sigma), state.grid)


def _l_block(l: int, state: StationaryState) -> np.ndarray:
    op = state.grid.mode_operator(l) - np.diag(state.f.derivative(state.sigma))
    return op[:-1, :-1]


def _assembly_residual(
    l: int,
    epsilon: float,
    matrix: np.ndarray,
    state: StationaryState,
    kernel: np.ndarray,
    b: float,
) -> float:
    """Apply the matrix to (r^l (1 - r^2), 0.7) and compare with the closed form."""
    r = state.grid.nodes
    phi = r**l * (1.0 - r * r)
    c = 0.7
    L_phi = -(4 * l + 6) * r**l - state.f.derivative(state.sigma) * phi
    jphi = float(modal_J(l, phi, state))
    s = jphi + b * c
    expected = np.concatenate(
        [L_phi[:-1] / epsilon + state.sigma_prime_1 * kernel * s, [s]]
    )
    got = matrix @ np.concatenate([phi[:-1], [c]])
    return float(np.max(np.abs(got - expected)) / max(1.0, np.max(np.abs(expected))))


def assemble_modal_operator(
    l: int,
    epsilon: float,
    gamma: float,
    state: StationaryState,
    n: int = DEFAULT_INTERIOR_NODES,
) -> ModalBlockOperator:
    """
    Assemble the dense block operator of degree l.

    Args:
        l: Degree (>= 0)
        epsilon: Time-scale ratio (> 0)
        gamma: Surface tension, unit-ball units
        state: Unit-ball stationary state; re-solved on n + 1 nodes
        n: Number of interior radial nodes

    Returns:
        ModalBlockOperator of size (n + 1) x (n + 1)
    """
    if epsilon <= 0.0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    if l < 0:
        raise ConfigurationError(f"degree must be nonnegative, got {l}")
    work = _modal_state(state, n)
    kernel = pi0_modal_kernel(l, work)[:-1]
    j = _j_row(l, work)
    L = _l_block(l, work)
    b = bgamma_multiplier(l, gamma, work)
    s1 = work.sigma_prime_1

    matrix = np.empty((n + 1, n + 1))
    matrix[:n, :n] = L / epsilon + s1 * np.outer(kernel, j)
    matrix[:n, n] = s1 * kernel * b
    matrix[n, :n] = j
    matrix[n, n] = b

    residual = _assembly_residual(l, epsilon, matrix, work, kernel, b)
    if residual > 1e-7:
        logger.warning("modal operator l=%d: assembly residual %.3e", l, residual)
    return ModalBlockOperator(
        l=l,
        epsilon=epsilon,
        gamma=gamma,
        matrix=matrix,
        state=work,
        j_row=j,
        kernel=kernel,
        l_block=L,
        multiplier=b,
        assembly_residual=residual,
    )


def _secular(op: ModalBlockOperator, lam: float) -> float:
    eps = op.epsilon
    shifted = eps * lam * np.eye(op.l_block.shape[0]) - op.l_block
    x = np.linalg.solve(shifted, op.kernel)
    return lam - op.multiplier - lam * eps * op.sigma_prime_1 * float(op.j_row @ x)


def _slow_vector(op: ModalBlockOperator, lam: float) -> np.ndarray:
    eps = op.epsilon
    shifted = eps * lam * np.eye(op.l_block.shape[0]) - op.l_block
    phi = eps * lam * op.sigma_prime_1 * np.linalg.solve(shifted, op.kernel)
    return np.concatenate([phi, [1.0]])


def _polish(op: ModalBlockOperator, candidate: float) -> float:
    if op.l == 1 and abs(op.multiplier) <= ZERO_MODE_TOL and abs(candidate) <= 1.0:
        # lambda = 0 solves the scalar equation exactly when b_1 = 0
        return 0.0
    step = 1e-7 * max(1.0, abs(candidate))
    try:
        sol = root_scalar(
            lambda lam: _secular(op, lam),
            x0=candidate,
            x1=candidate + step,
            method="secant",
            xtol=1e-15,
            rtol=1e-14,
            maxiter=60,
        )
    except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        logger.debug("slow-branch polish failed for l=%d: %s", op.l, exc)
        return candidate
    if not sol.converged or abs(sol.root - candidate) > 0.1 * max(1.0, abs(candidate)):
        return candidate
    return float(sol.root)


def _dump_matrix(matrix: np.ndarray) -> str:
    fd, path = tempfile.mkstemp(prefix="tumor-spectra-matrix-", suffix=".npy")
    os.close(fd)
    np.save(path, matrix)
    return path


def _clean(values: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=complex).copy()
    small = np.abs(out.imag) <= IMAG_TOL * np.maximum(1.0, np.abs(out.real))
    out[small] = out[small].real
    return out


def modal_eigenvalues(
    op: ModalBlockOperator, previous: Optional[complex] = None
) -> EpsilonSpectrumReport:
    """
    Dense spectrum of a modal block operator with its slow branch identified.

    The slow eigenvalue is the one whose eigenvector is most concentrated on
    the boundary coefficient c; when two candidates are within 1e-3 of each
    other in that measure the one closest to ``previous`` wins.

    Raises:
        EigenSolverError: If LAPACK fails; the matrix is saved for inspection
    """
    try:
        values, vectors = scipy.linalg.eig(op.matrix)
    except (np.linalg.LinAlgError, ValueError) as exc:
        path = _dump_matrix(op.matrix)
        raise EigenSolverError(
            f"eigensolver failed for l={op.l}, epsilon={op.epsilon}: {exc}",
            dump_path=path,
        ) from exc
    if not np.all(np.isfinite(values)):
        path = _dump_matrix(op.matrix)
        raise EigenSolverError(
            f"non-finite eigenvalues for l={op.l}, epsilon={op.epsilon}",
            dump_path=path,
        )

    weight = np.abs(vectors[-1, :]) / np.linalg.norm(vectors, axis=0)
    best = float(np.max(weight))
    close = np.flatnonzero(weight >= best - 1e-3)
    if previous is not None and close.size > 1:
        idx = int(close[np.argmin(np.abs(values[close] - previous))])
    else:
        idx = int(np.argmax(weight))

    values = _clean(values)
    slow = complex(values[idx])
    if slow.imag == 0.0:
        slow = complex(_polish(op, slow.real), 0.0)
        vector = _slow_vector(op, slow.real)
    else:
        vector = vectors[:, idx] / vectors[-1, idx]
    values[idx] = slow

    fast = np.delete(values, idx)
    order = np.argsort(-values.real, kind="stable")
    ratio = float(np.max(np.abs(vector[:-1])) / abs(vector[-1]))
    return EpsilonSpectrumReport(
        l=op.l,
        epsilon=op.epsilon,
        gamma=op.gamma,
        eigenvalues=values[order],
        slow_branch=slow,
        slow_eigvec_ratio=ratio,
        fast_branch_max=float(np.max(fast.real)) if fast.size else float("-inf"),
        slow_eigenvector=vector,
    )


def epsilon_spectrum(
    l: int,
    epsilon: float,
    gamma: float,
    state: StationaryState,
    n: int = DEFAULT_INTERIOR_NODES,
    previous: Optional[complex] = None,
) -> EpsilonSpectrumReport:
    """Assemble and solve in one call."""
    op = assemble_modal_operator(l, epsilon, gamma, state, n)
    return modal_eigenvalues(op, previous)


def dirichlet_spectrum(
    l: int, state: StationaryState, n: int = DEFAULT_INTERIOR_NODES
) -> np.ndarray:
    """Eigenvalues of L_l with phi(1) = 0, sorted descending (all real, negative)."""
    work = _modal_state(state, n)
    values = scipy.linalg.eigvals(_l_block(l, work))
    return np.sort(values.real)[::-1]


def fit_slow_branch(
    l: int,
    gamma: float,
    epsilons: Sequence[float],
    state: StationaryState,
    n: int = DEFAULT_INTERIOR_NODES,
) -> Dict[str, float]:
    """
    Linear fit of the slow branch against epsilon.

    Returns:
        Dictionary with the limit alpha_l(gamma), fitted slope, intercept,
        R^2 and the largest |lambda(eps) - alpha_l| / eps
    """
    epsilons = np.asarray(sorted(epsilons), dtype=float)
    if epsilons.size < 2:
        raise ConfigurationError("need at least two epsilon values to fit a slope")
    work = _modal_state(state, n)
    limit = bgamma_multiplier(l, gamma, work)
    slow, previous = [], None
    for eps in epsilons:
        report = epsilon_spectrum(l, float(eps), gamma, work, n, previous)
        previous = report.slow_branch
        slow.append(report.slow_branch.real)
    slow = np.asarray(slow)
    gap = slow - limit
    if np.max(np.abs(gap)) <= 1e-14 * max(1.0, abs(limit)):
        slope, intercept, r2 = 0.0, float(np.mean(slow)), 1.0
    else:
        fit = linregress(epsilons, slow)
        slope, intercept = float(fit.slope), float(fit.intercept)
        r2 = float(fit.rvalue**2)
    return {
        "l": l,
        "gamma": gamma,
        "limit": limit,
        "slope": slope,
        "intercept": intercept,
        "r2": r2,
        "max_scaled_gap": float(np.max(np.abs(gap) / epsilons)),
    }


def _nonzero_max(report: EpsilonSpectrumReport) -> float:
    values = report.eigenvalues
    if report.l == 1 and abs(report.slow_branch) <= ZERO_MODE_TOL:
        values = np.delete(values, int(np.argmin(np.abs(values - report.slow_branch))))
    return float(np.max(values.real)) if values.size else float("-inf")


def max_nonzero_real_part(
    degrees: Iterable[int],
    epsilon: float,
    gamma: float,
    state: StationaryState,
    n: int = DEFAULT_INTERIOR_NODES,
    jobs: int = 1,
) -> Tuple[float, int]:
    """
    Largest real part over the modal spectra of the given degrees.

    The degree-1 zero eigenvalue is excluded.

    Returns:
        (max real part, degree attaining it)
    """
    degrees = list(degrees)
    work = _modal_state(state, n)

    def evaluate(l: int) -> float:
        return _nonzero_max(epsilon_spectrum(l, epsilon, gamma, work, n))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(evaluate, degrees))
    else:
        values = [evaluate(l) for l in degrees]
    idx = int(np.argmax(values))
    return float(values[idx]), degrees[idx]


def epsilon_threshold(
    gamma: float,
    state: StationaryState,
    l_max: int = 64,
    n: int = DEFAULT_INTERIOR_NODES,
    grid: Tuple[float, float, int] = DEFAULT_EPSILON_GRID,
    bisection_steps: int = DEFAULT_BISECTION_STEPS,
    summary: Optional[SpectralSummary] = None,
    jobs: int = 1,
) -> EpsilonThreshold:
    """
    Estimate the largest epsilon for which the modal spectra obey alpha*/2.

    The geometric grid is scanned upward until the bound first fails; the
    crossing is then refined by geometric bisection.

    Args:
        gamma: Surface tension, must exceed gamma_star
        state: Unit-ball stationary state
        l_max: Largest degree tested (degrees 0..l_max)
        n: Interior radial nodes per modal operator
        grid: (eps_min, eps_max, points) of the scan
        bisection_steps: Geometric bisection steps after the scan
        summary: Precomputed spectral summary at ``l_max``, if available
        jobs: Worker threads across degrees

    Raises:
        ThresholdUndefinedError: If gamma <= gamma_star
    """
    if summary is None or summary.l_max != l_max or summary.gamma != gamma:
        summary = spectral_summary(state, gamma=gamma, l_max=l_max, jobs=jobs)
    if gamma <= summary.gamma_star:
        raise ThresholdUndefinedError(
            f"threshold undefined below gamma_star: gamma={gamma!r} <= "
            f"gamma_star={summary.gamma_star!r}",
            details=[{"gamma": gamma, "gamma_star": summary.gamma_star}],
        )
    alpha_star = float(summary.alpha_star)
    bound = 0.5 * alpha_star
    degrees = range(0, l_max + 1)
    eps_grid = np.geomspace(grid[0], grid[1], int(grid[2]))

    def holds(eps: float) -> Tuple[bool, float]:
        value, l_arg = max_nonzero_real_part(degrees, eps, gamma, state, n, jobs)
        logger.debug(
            "eps=%.3e: max Re = %.6g (l=%d), bound %.6g", eps, value, l_arg, bound
        )
        return value <= bound, value

    passed, failed, best = None, None, None
    for eps in eps_grid:
        ok, value = holds(float(eps))
        if not ok:
            failed = float(eps)
            break
        passed, best = float(eps), value

    if passed is not None and failed is not None:
        lo, hi = passed, failed
        for _ in range(bisection_steps):
            mid = float(np.sqrt(lo * hi))
            ok, value = holds(mid)
            if ok:
                lo, best = mid, value
            else:
                hi = mid
        passed, failed = lo, hi

    if passed is None:
        logger.warning("spectral bound fails already at eps=%g", eps_grid[0])
    result = EpsilonThreshold(
        gamma=gamma,
        gamma_star=summary.gamma_star,
        alpha_star=alpha_star,
        bound=bound,
        epsilon0=passed,
        epsilon_fail=failed,
        l_max=l_max,
        grid=[float(e) for e in eps_grid],
        bisection_steps=bisection_steps,
        saturated=failed is None,
        max_real_part=best,
    )
    logger.info("epsilon0(gamma=%g) = %s", gamma, result.epsilon0)
    return result


def slow_branch_table(
    degrees: Iterable[int],
    epsilons: Sequence[float],
    gamma: float,
    state: StationaryState,
    n: int = DEFAULT_INTERIOR_NODES,
) -> List[EpsilonSpectrumReport]:
    """Reports for every (l, eps) pair, epsilons tracked in increasing order."""
    reports = []
    for l in degrees:
        previous = None
        for eps in sorted(epsilons):
            report = epsilon_spectrum(l, float(eps), gamma, state, n, previous)
            previous = report.slow_branch
            reports.append(report)
    return reports
