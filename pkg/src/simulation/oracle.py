"""
Ground-truth evolution by matrix exponential of the truncated generator.

The generator is assembled as a sparse matrix over the joint index space.
It conserves n + k for one mode, and n1 + n2 together with n1 - k for two
modes, so ``evolve`` exponentiates each conserved block densely with
scipy's scaling-and-squaring Pade routine and caches blocks by content.
"""

import hashlib
import logging
from typing import Dict, List, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import expm

from src.core.exceptions import LeakageExceeded, WindowTooNarrow, WrongModeCount
from src.core.types import CouplingSet, Generator, JointState, TruncationConfig

logger = logging.getLogger(__name__)

# Ladder steps from an edge that count as boundary
BOUNDARY_STEPS = 2


def _joint_grid(trunc: TruncationConfig, mode_count: int) -> List[np.ndarray]:
    axes = [trunc.k_values] + [np.arange(trunc.n_size)] * mode_count
    return [g.reshape(-1) for g in np.meshgrid(*axes, indexing="ij")]


def interior_mask(trunc: TruncationConfig, mode_count: int = 1) -> np.ndarray:
    """
    Boolean mask (joint-index order) of indices at least two ladder steps
    away from every window edge.
    """
    grid = _joint_grid(trunc, mode_count)
    k = grid[0]
    mask = (k >= trunc.k_min + BOUNDARY_STEPS) & (k <= trunc.k_max - BOUNDARY_STEPS)
    for n in grid[1:]:
        mask &= n <= trunc.n_max - BOUNDARY_STEPS
    return mask


def boundary_leakage(state: JointState) -> float:
    """Probability carried by indices within two steps of a window edge."""
    mask = interior_mask(state.trunc, state.mode_count)
    return float(np.sum(np.abs(state.flat()[~mask]) ** 2))


def _assemble(
    dim: int,
    sources: List[np.ndarray],
    targets: List[np.ndarray],
    values: List[np.ndarray],
) -> sparse.csr_matrix:
    rows = np.concatenate(targets)
    cols = np.concatenate(sources)
    data = np.concatenate(values).astype(complex)
    keep = data != 0
    return sparse.csr_matrix(
        (data[keep], (rows[keep], cols[keep])), shape=(dim, dim), dtype=complex
    )


def build_single_mode_generator(
    coupling: CouplingSet, trunc: TruncationConfig
) -> Generator:
    """
    Generator g_qu b a^+ - g_qu^* b^+ a + g2 b^+2 a^2 - g2^* b^2 a^+2 - g_p(a a^+ + a^+ a).

    b lowers the electron index by one; amplitudes pushed past the window
    are dropped.

    Raises:
        WindowTooNarrow: If k_max - k_min < 2 (n_max + 2)
    """
    if trunc.k_max - trunc.k_min < 2 * (trunc.n_max + 2):
        raise WindowTooNarrow(
            f"k window [{trunc.k_min}, {trunc.k_max}] too narrow for "
            f"n_max={trunc.n_max}; need width >= {2 * (trunc.n_max + 2)}",
            k_min=trunc.k_min,
            k_max=trunc.k_max,
            n_max=trunc.n_max,
        )

    k, n = _joint_grid(trunc, 1)
    dim = k.size
    source = np.arange(dim)
    nf = n.astype(float)

    # (dk, dn, amplitude per source)
    moves = [
        (-1, 1, coupling.g_qu * np.sqrt(nf + 1)),
        (1, -1, -np.conj(coupling.g_qu) * np.sqrt(nf)),
        (2, -2, coupling.g_qu2 * np.sqrt(nf * (nf - 1))),
        (-2, 2, -np.conj(coupling.g_qu2) * np.sqrt((nf + 1) * (nf + 2))),
        (0, 0, -coupling.g_p * (2 * nf + 1)),
    ]
    sources, targets, values = [], [], []
    for dk, dn, amp in moves:
        k_to, n_to = k + dk, n + dn
        ok = (
            (k_to >= trunc.k_min)
            & (k_to <= trunc.k_max)
            & (n_to >= 0)
            & (n_to <= trunc.n_max)
        )
        sources.append(source[ok])
        targets.append((k_to[ok] - trunc.k_min) * trunc.n_size + n_to[ok])
        values.append(np.broadcast_to(amp, dim)[ok])

    matrix = _assemble(dim, sources, targets, values)
    logger.debug(f"Single-mode generator: dim={dim}, nnz={matrix.nnz}")
    return Generator(
        trunc=trunc,
        matrix=matrix,
        mode_count=1,
        labels=n + k,
        couplings=coupling,
    )


def build_two_mode_generator(g_p12: complex, trunc: TruncationConfig) -> Generator:
    """
    Generator -2 g_p12 b1^+ b2 a1 a2^+ + 2 g_p12^* b1 b2^+ a1^+ a2.

    The first term moves a photon from mode 1 to mode 2 and lowers k by one;
    n1 + n2 and n1 - k are conserved.

    Raises:
        WindowTooNarrow: If the k window cannot hold a single transfer
    """
    if trunc.k_max - trunc.k_min < 2:
        raise WindowTooNarrow(
            f"k window [{trunc.k_min}, {trunc.k_max}] cannot hold a transfer"
        )

    k, n1, n2 = _joint_grid(trunc, 2)
    dim = k.size
    source = np.arange(dim)
    f1, f2 = n1.astype(float), n2.astype(float)
    size = trunc.n_size

    moves = [
        (-1, -1, 1, -2.0 * g_p12 * np.sqrt(f1 * (f2 + 1))),
        (1, 1, -1, 2.0 * np.conj(g_p12) * np.sqrt((f1 + 1) * f2)),
    ]
    sources, targets, values = [], [], []
    for dk, d1, d2, amp in moves:
        k_to, a_to, b_to = k + dk, n1 + d1, n2 + d2
        ok = (
            (k_to >= trunc.k_min)
            & (k_to <= trunc.k_max)
            & (a_to >= 0)
            & (a_to <= trunc.n_max)
            & (b_to >= 0)
            & (b_to <= trunc.n_max)
        )
        sources.append(source[ok])
        targets.append(((k_to[ok] - trunc.k_min) * size + a_to[ok]) * size + b_to[ok])
        values.append(amp[ok])

    matrix = _assemble(dim, sources, targets, values)
    # Encode the pair (n1 + n2, n1 - k) as one integer
    span = trunc.n_max + trunc.k_max - trunc.k_min + 1
    labels = (n1 + n2) * span + (n1 - k + trunc.k_max)
    logger.debug(f"Two-mode generator: dim={dim}, nnz={matrix.nnz}")
    return Generator(
        trunc=trunc, matrix=matrix, mode_count=2, labels=labels, g_p12=complex(g_p12)
    )


def _blocks(labels: np.ndarray, active: np.ndarray) -> List[np.ndarray]:
    """Index sets of the conserved blocks touched by active indices."""
    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    bounds = np.flatnonzero(np.diff(sorted_labels)) + 1
    groups = np.split(order, bounds)
    wanted = set(np.unique(labels[active]).tolist())
    return [g for g in groups if int(labels[g[0]]) in wanted]


def evolve(gen: Generator, state: JointState) -> JointState:
    """
    Apply exp(G) to a joint state.

    Args:
        gen: Generator built for the state's window
        state: Input state

    Returns:
        Evolved state with ``leakage`` set to the boundary probability

    Raises:
        WrongModeCount: If generator and state disagree on modes
        WindowTooNarrow: If generator and state use different windows
        LeakageExceeded: If the boundary probability exceeds trunc.leak_tol
    """
    if gen.mode_count != state.mode_count:
        raise WrongModeCount(
            f"generator has {gen.mode_count} modes, state has {state.mode_count}"
        )
    if gen.trunc != state.trunc:
        raise WindowTooNarrow("generator and state use different windows")

    x = state.flat()
    out = np.zeros_like(x)
    cache: Dict[Tuple[int, str], np.ndarray] = {}
    hits = 0

    for idx in _blocks(gen.labels, np.abs(x) > 0):
        block = gen.matrix[idx][:, idx].toarray()
        key = (block.shape[0], hashlib.sha1(block.tobytes()).hexdigest())
        if key in cache:
            hits += 1
        else:
            cache[key] = expm(block)
        out[idx] = cache[key] @ x[idx]

    logger.debug(f"Evolved {len(cache)} distinct blocks ({hits} cache hits)")

    result = JointState(
        trunc=state.trunc,
        amps=out.reshape(state.amps.shape),
        mode_count=state.mode_count,
        tail_weight=state.tail_weight,
    )
    leakage = boundary_leakage(result)
    result = JointState(
        trunc=result.trunc,
        amps=result.amps,
        mode_count=result.mode_count,
        tail_weight=result.tail_weight,
        leakage=leakage,
    )

    drift = abs(result.norm - state.norm)
    if drift > max(1e-9, leakage):
        logger.warning(f"Norm drift {drift:.3e} exceeds leakage {leakage:.3e}")
    if leakage > state.trunc.leak_tol:
        logger.error(
            f"Boundary leakage {leakage:.3e} exceeds leak_tol {state.trunc.leak_tol:.1e}"
        )
        raise LeakageExceeded(
            f"boundary leakage {leakage:.3e} exceeds {state.trunc.leak_tol:.1e}; "
            f"widen the window",
            leakage=leakage,
            leak_tol=state.trunc.leak_tol,
        )
    if leakage > 0.1 * state.trunc.leak_tol:
        logger.warning(f"Boundary leakage {leakage:.3e} near tolerance")
    return result


def anti_hermitian_defect(gen: Generator) -> float:
    """max |G + G^+| over interior indices."""
    mask = interior_mask(gen.trunc, gen.mode_count)
    defect = (gen.matrix + gen.matrix.conj().T).tocsr()[mask][:, mask]
    return float(np.max(np.abs(defect.toarray()))) if defect.nnz else 0.0


def norm_tolerance(state: JointState) -> float:
    """Norm tolerance the evolution guarantees: max(1e-9, leakage)."""
    return max(1e-9, state.leakage)


def block_dimension(gen: Generator) -> int:
    """Largest conserved block of the generator."""
    _, counts = np.unique(gen.labels, return_counts=True)
    return int(counts.max()) if counts.size else 0
