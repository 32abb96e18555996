"""Kinematically optimal targets and attainability bounds for mixed rotor states.

Under purely unitary evolution the best attainable expectation of an
observable from a given state is reached by pairing the sorted spectrum of
the state with the sorted spectrum of the observable, largest with largest.
Restricting to block-respecting unitaries (linearly polarized driving) the
pairing is carried out inside every invariant block separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BlockDecomposition, block_decomposition, build_basis
from .evolution import LevelSetMeasure, TraceSeries, global_max, measure_above
from .operators import (
    DensityMatrix,
    HermitianOperator,
    h0_matrix,
    observable_matrix,
    thermal_state,
)

GLOBAL_SCOPE = "global"
BLOCKWISE_SCOPE = "blockwise"

_OFF_BLOCK_TOL = 1e-12


@dataclass(frozen=True)
class PairingResult:
    """Optimal assignment of state weights to observable eigenvalues.

    permutation[k] is the index (into the weight list as given) paired with
    the k-th eigenvalue as given; value is the achieved expectation.
    """

    permutation: tuple[int, ...]
    value: float


def optimal_pairing(weights, eigenvalues) -> PairingResult:
    """Pair the k-th largest weight with the k-th largest eigenvalue.

    Ties break by input position (stable), so the result is deterministic.
    """
    w = np.asarray(weights, dtype=float)
    x = np.asarray(eigenvalues, dtype=float)
    if w.shape != x.shape or w.ndim != 1:
        raise ValueError(f"weights and eigenvalues must be equal-length vectors, got {w.shape} and {x.shape}")
    if w.size and (w.min() < -1e-9 or w.max() > 1 + 1e-9):
        raise ValueError("weights must lie in [0, 1]")
    order_w = np.argsort(-w, kind="stable")
    order_x = np.argsort(-x, kind="stable")
    perm = np.empty(w.size, dtype=int)
    perm[order_x] = order_w
    value = float(np.dot(x[order_x], w[order_w]))
    return PairingResult(permutation=tuple(int(p) for p in perm), value=value)


@dataclass(frozen=True, eq=False)
class TargetState:
    """Density matrix commuting with the observable that realizes a kinematical bound."""

    rho: DensityMatrix
    scope: str  # "global" (any unitary) or "blockwise" (block-respecting unitaries)
    observable: HermitianOperator
    achieved: float
    blocks: BlockDecomposition | None = None


def _max_off_block(matrix: np.ndarray, blocks: BlockDecomposition) -> float:
    off = blocks.coupling_mask(matrix.shape[0])
    return float(np.max(np.abs(matrix[off]))) if off.any() else 0.0


def build_target(
    rho0: DensityMatrix,
    obs: HermitianOperator,
    blocks: BlockDecomposition | None = None,
) -> TargetState:
    """Assemble the state maximizing Tr[obs rho] over unitaries acting on rho0.

    With blocks=None every unitary is admissible and all weights are paired
    globally; with a block decomposition both inputs must be block diagonal
    and the pairing runs inside each block.  Degenerate observable
    eigenvalues are filled in deterministic basis order, which leaves the
    achieved expectation unchanged.
    """
    if rho0.basis is not obs.basis and rho0.basis != obs.basis:
        raise ValueError("state and observable live on different bases")
    n = rho0.dim

    if blocks is None:
        # deterministic eigenbasis: per-block eigenvectors when metadata is available
        pieces = obs.blocks.blocks if obs.blocks is not None else None
        chis = []
        vecs = []
        if pieces is None:
            w, v = np.linalg.eigh(obs.matrix)
            chis = list(w)
            vecs = [v[:, k] for k in range(n)]
        else:
            for block in pieces:
                w, v = np.linalg.eigh(obs.block_view(block))
                for k in range(block.size):
                    full = np.zeros(n, dtype=complex)
                    full[list(block.members)] = v[:, k]
                    chis.append(float(w[k]))
                    vecs.append(full)
        order = np.argsort(-np.asarray(chis), kind="stable")
        weights = rho0.eigenvalues  # descending
        mat = np.zeros((n, n), dtype=complex)
        achieved = 0.0
        for rank, k in enumerate(order):
            mat += weights[rank] * np.outer(vecs[k], vecs[k].conj())
            achieved += weights[rank] * chis[k]
        mat = 0.5 * (mat + mat.conj().T)
        rho_f = DensityMatrix(rho0.basis, mat, trace_target=rho0.trace_target)
        return TargetState(rho=rho_f, scope=GLOBAL_SCOPE, observable=obs, achieved=float(achieved))

    for name, matrix in (("state", rho0.matrix), ("observable", obs.matrix)):
        dev = _max_off_block(matrix, blocks)
        if dev > _OFF_BLOCK_TOL:
            raise ValueError(f"{name} is not block diagonal in the requested decomposition ({dev:.3e})")

    mat = np.zeros((n, n), dtype=complex)
    achieved = 0.0
    for block in blocks.blocks:
        idx = list(block.members)
        chi, vec = np.linalg.eigh(obs.matrix[np.ix_(idx, idx)])
        w_block = np.linalg.eigvalsh(rho0.matrix[np.ix_(idx, idx)])
        chi, vec = chi[::-1], vec[:, ::-1]  # descending
        w_block = w_block[::-1]
        achieved += float(np.dot(chi, w_block))
        sub = (vec * w_block) @ vec.conj().T
        mat[np.ix_(idx, idx)] = sub
    mat = 0.5 * (mat + mat.conj().T)
    rho_f = DensityMatrix(rho0.basis, mat, trace_target=rho0.trace_target)
    return TargetState(rho=rho_f, scope=BLOCKWISE_SCOPE, observable=obs, achieved=float(achieved), blocks=blocks)


def duration_above(
    rho: DensityMatrix,
    obs: HermitianOperator,
    h0: HermitianOperator,
    threshold: float,
    n_samples: int = 8192,
) -> LevelSetMeasure:
    """Fraction of a free-evolution period with Tr[obs rho(t)] at or above threshold.

    Measured over one period anchored at the time of maximum expectation;
    crossings are refined by bisection to 1e-10 in t.  Returns both the
    summed measure and the longest contiguous stretch, in units of the
    rotational period.
    """
    eig = obs.eigensystem[0]
    if not (eig[0] < threshold < eig[-1]):
        raise ValueError(f"threshold {threshold} outside the observable range [{eig[0]:.6f}, {eig[-1]:.6f}]")
    energies = np.diag(h0.matrix).real
    if np.any(h0.matrix != np.diag(np.diag(h0.matrix))):
        raise ValueError("h0 must be diagonal in the stored basis")
    series = TraceSeries(rho.matrix, obs.matrix, energies)
    peak = global_max(series, 0.0)
    if peak.flat:
        hit = 1.0 if peak.value >= threshold else 0.0
        return LevelSetMeasure(total=hit, longest=hit)
    return measure_above(series, threshold, t_anchor=peak.t, n_samples=n_samples)


@dataclass(frozen=True)
class SweepRow:
    """One point of the bound sweep: bounds and target persistence at (j_max, T)."""

    kind: str
    j_max: int
    temperature_k: float
    optimal: float
    linear: float
    duration_linear: float
    duration_linear_longest: float


def bound_sweep(
    j_max_values,
    temperatures_k,
    kind: str,
    b_cm: float,
    kb_cm_per_k: float,
    z_mode: str = "full",
    renormalize: bool = False,
    threshold: float = 0.5,
) -> list[SweepRow]:
    """Kinematical bounds and blockwise-target persistence over a (j_max, T) grid."""
    rows = []
    for temperature in temperatures_k:
        if temperature <= 0:
            raise ValueError(f"temperature must be positive, got {temperature}")
        beta = b_cm / (kb_cm_per_k * temperature)
        for j_max in j_max_values:
            basis = build_basis(j_max)
            obs = observable_matrix(basis, kind)
            h0 = h0_matrix(basis)
            rho0 = thermal_state(basis, beta, z_mode=z_mode, renormalize=renormalize)
            blocks = block_decomposition(basis, kind)
            opt = build_target(rho0, obs)
            lin = build_target(rho0, obs, blocks)
            dur = duration_above(lin.rho, obs, h0, threshold)
            rows.append(
                SweepRow(
                    kind=kind,
                    j_max=j_max,
                    temperature_k=temperature,
                    optimal=opt.achieved,
                    linear=lin.achieved,
                    duration_linear=dur.total,
                    duration_linear_longest=dur.longest,
                )
            )
    return rows
