"""Lie-algebra controllability tests and fixed-point diagnostics.

The dynamical Lie algebra generated by i*H0 and i*O decides whether every
invariant block can be steered independently by the one shared control
field.  Simultaneous controllability of all blocks requires one dimension
count; exploiting the identical dynamics of the m and -m blocks relaxes it
to a smaller count.  A separate rank computation characterizes the fixed
points of the greedy kick iteration: states commuting with the driving
functional are the only fixed points exactly when the span of the rotated
commutators saturates its commutant-complement bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import ORIENTATION, block_decomposition, build_basis, check_process_kind
from .operators import (
    DensityMatrix,
    HermitianOperator,
    eigenvalue_multiplicities,
    h0_matrix,
    observable_matrix,
)

SKEW_TOL = 1e-12
RANK_TOL = 1e-10
STATIONARY_TOL = 1e-10

DEFAULT_AMPLITUDE_GRID = np.linspace(0.0, 4.0 * np.pi, 64)


def _trace_inner(x: np.ndarray, y: np.ndarray) -> float:
    # Re Tr[X+ Y]; a real inner product on the skew-Hermitian (or Hermitian) matrices
    return float(np.vdot(x, y).real)


def lie_closure(generators, tol: float = RANK_TOL) -> tuple[int, list[np.ndarray]]:
    """Dimension and orthonormal basis of the real Lie algebra closing the generators.

    Repeatedly commutes every basis pair, orthonormalizes under the trace
    inner product, and keeps residuals whose relative norm exceeds tol.
    Generators must be skew-Hermitian; the count is a real dimension, as for
    u(N).
    """
    mats = [np.array(g, dtype=complex) for g in generators]
    for g in mats:
        dev = float(np.max(np.abs(g + g.conj().T)))
        if dev > SKEW_TOL:
            raise ValueError(f"generator is not skew-Hermitian: deviation {dev:.3e}")

    basis: list[np.ndarray] = []

    def orthonormalize(candidate: np.ndarray) -> bool:
        scale = np.sqrt(_trace_inner(candidate, candidate))
        if scale == 0.0:
            return False
        res = candidate.copy()
        for _ in range(2):  # double pass for numerical stability
            for b in basis:
                res = res - _trace_inner(b, res) * b
        norm = np.sqrt(_trace_inner(res, res))
        if norm <= tol * scale:
            return False
        basis.append(res / norm)
        return True

    fresh = [g for g in mats if orthonormalize(g)]
    while fresh:
        produced: list[np.ndarray] = []
        snapshot = list(basis)
        for x in snapshot:
            for y in fresh:
                comm = x @ y - y @ x
                if orthonormalize(comm):
                    produced.append(basis[-1])
        fresh = produced
    return len(basis), basis


def block_trace_rank(j_max: int, kind: str) -> int:
    """Rank of the per-block trace matrix [Tr H0 | Tr O] over the invariant blocks.

    Orientation blocks are the m subspaces; alignment additionally resolves
    the parity of j.  cos(theta) is traceless in every block, so the
    orientation rank is 1; the alignment matrix carries two independent
    columns.
    """
    check_process_kind(kind)
    if j_max < 1:
        raise ValueError("j_max must be at least 1")
    basis = build_basis(j_max)
    blocks = block_decomposition(basis, kind)
    h0 = h0_matrix(basis)
    obs = observable_matrix(basis, kind)
    t = np.array([[h0.block_trace(b), obs.block_trace(b)] for b in blocks.blocks])
    s = np.linalg.svd(t, compute_uv=False)
    return int(np.sum(s > RANK_TOL * s[0]))


def _alignment_subblock_sizes(j_max: int, m_from: int) -> list[int]:
    sizes = []
    for m in range(m_from, j_max + 1):
        for parity in (0, 1):
            size = sum(1 for j in range(m, j_max + 1) if j % 2 == parity)
            if size:
                sizes.append(size)
    return sizes


def dims_required(j_max: int, r: int, kind: str = ORIENTATION) -> tuple[int, int]:
    """Lie-algebra dimensions demanded for simultaneous controllability.

    The first count treats every invariant block independently; the second
    exploits the m <-> -m symmetry and only counts blocks with m >= 0 (for
    alignment, the parity-resolved sub-blocks).
    """
    check_process_kind(kind)
    if j_max < 1 or r < 1:
        raise ValueError("j_max and r must be at least 1")
    core = (j_max + 1) ** 2 - 1
    wing = sum((j_max - m + 1) ** 2 - 1 for m in range(1, j_max + 1))
    d_general = r + core + 2 * wing
    if kind == ORIENTATION:
        d_restricted = r + core + wing
    else:
        d_restricted = r + sum(s**2 - 1 for s in _alignment_subblock_sizes(j_max, m_from=0))
    return d_general, d_restricted


@dataclass(frozen=True)
class LieAlgebraReport:
    """Computed algebra dimension versus the simultaneous-controllability counts."""

    j_max: int
    kind: str
    dim_l: int
    rank: int
    dim_required: int
    dim_required_restricted: int

    @property
    def simultaneous(self) -> bool:
        return self.dim_l == self.dim_required

    @property
    def restricted_simultaneous(self) -> bool:
        return self.dim_l == self.dim_required_restricted

    def to_jsonable(self) -> dict:
        return {
            "j_max": self.j_max,
            "process": self.kind,
            "dim_L": self.dim_l,
            "r": self.rank,
            "D": self.dim_required,
            "D_prime": self.dim_required_restricted,
            "simultaneous": self.simultaneous,
            "restricted_simultaneous": self.restricted_simultaneous,
        }


def controllability_report(j_max: int, kind: str) -> LieAlgebraReport:
    """Close the algebra of the rotor generators and compare with the required counts."""
    basis = build_basis(j_max)
    h0 = h0_matrix(basis)
    obs = observable_matrix(basis, kind)
    dim_l, _ = lie_closure([1j * h0.matrix, 1j * obs.matrix])
    r = block_trace_rank(j_max, kind)
    d, d_prime = dims_required(j_max, r, kind)
    return LieAlgebraReport(
        j_max=j_max,
        kind=kind,
        dim_l=dim_l,
        rank=r,
        dim_required=d,
        dim_required_restricted=d_prime,
    )


@dataclass(frozen=True)
class TwoLevelReport:
    """The pair of two-level blocks at m = +-(j_max - 1) that blocks simultaneous control."""

    j_max: int
    coupling: float  # off-diagonal cos(theta) element, same in both blocks
    e0: float
    e1: float
    gap_plus: float
    gap_minus: float

    @property
    def gaps_equal(self) -> bool:
        return self.gap_plus == self.gap_minus


def two_level_obstruction(j_max: int) -> TwoLevelReport:
    """Extract the m = +-(j_max - 1) two-level blocks and verify their equal gaps.

    Two uncoupled two-level systems with identical transition frequencies and
    identical couplings cannot be steered independently by one shared field.
    """
    if j_max <= 1:
        raise ValueError("two-level obstruction needs j_max > 1")
    basis = build_basis(j_max)
    obs = observable_matrix(basis, ORIENTATION)
    h0 = h0_matrix(basis)
    m = j_max - 1
    couplings = []
    gaps = []
    for sign in (1, -1):
        a = basis.index_of(j_max - 1, sign * m)
        b = basis.index_of(j_max, sign * m)
        couplings.append(float(obs.matrix[a, b].real))
        gaps.append(float((h0.matrix[b, b] - h0.matrix[a, a]).real))
    e0 = float(h0.matrix[basis.index_of(j_max - 1, m), basis.index_of(j_max - 1, m)].real)
    e1 = float(h0.matrix[basis.index_of(j_max, m), basis.index_of(j_max, m)].real)
    assert abs(couplings[0] - couplings[1]) <= 1e-15, "m and -m couplings differ"
    assert abs(couplings[0] - 1.0 / np.sqrt(2 * j_max + 1)) <= 1e-12
    return TwoLevelReport(
        j_max=j_max,
        coupling=couplings[0],
        e0=e0,
        e1=e1,
        gap_plus=gaps[0],
        gap_minus=gaps[1],
    )


def _rotated_commutators(
    h0: HermitianOperator,
    functional: HermitianOperator,
    kick,
    amplitudes: np.ndarray,
) -> list[np.ndarray]:
    comm_dev = float(np.max(np.abs(kick.operator.matrix @ functional.matrix - functional.matrix @ kick.operator.matrix)))
    if comm_dev > STATIONARY_TOL:
        raise ValueError(f"kick generator does not commute with the functional ({comm_dev:.3e})")
    base = 1j * (h0.matrix @ functional.matrix - functional.matrix @ h0.matrix)  # Hermitian
    out = []
    for a in amplitudes:
        u = kick.unitary(float(a))
        out.append(u.conj().T @ base @ u)
    return out


@dataclass(frozen=True)
class FixedPointReport:
    """Span of the rotated slope operators versus its commutant-complement bound."""

    dim: int
    dim_span: int
    multiplicities: tuple[int, ...]
    commutant_dim: int
    bound: int  # N^2 - sum(n_i^2)

    @property
    def saturated(self) -> bool:
        """True when only states commuting with the functional are fixed points."""
        return self.dim_span == self.bound

    def to_jsonable(self) -> dict:
        return {
            "N": self.dim,
            "dim_span": self.dim_span,
            "multiplicities": list(self.multiplicities),
            "commutant_dim": self.commutant_dim,
            "bound": self.bound,
            "saturated": self.saturated,
        }


def fixed_point_analysis(
    h0: HermitianOperator,
    functional: HermitianOperator,
    kick,
    amplitudes: np.ndarray | None = None,
    tol: float = RANK_TOL,
) -> FixedPointReport:
    """Rank of span{ U(a)+ [H0, B] U(a) } against N^2 - sum of squared multiplicities.

    B is the driving functional, U(a) the kick family over the amplitude
    grid.  B-commuting states annihilate every spanning operator, so the
    span can never exceed the complement of B's commutant; saturation means
    those states are the only stationary ones.
    """
    if amplitudes is None:
        amplitudes = DEFAULT_AMPLITUDE_GRID
    ops = _rotated_commutators(h0, functional, kick, np.asarray(amplitudes, dtype=float))
    n = functional.dim
    rows = np.array([np.concatenate([op.real.ravel(), op.imag.ravel()]) for op in ops])
    s = np.linalg.svd(rows, compute_uv=False)
    dim_span = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    mult = tuple(eigenvalue_multiplicities(functional))
    commutant = int(sum(k**2 for k in mult))
    return FixedPointReport(
        dim=n,
        dim_span=dim_span,
        multiplicities=mult,
        commutant_dim=commutant,
        bound=n * n - commutant,
    )


def is_kick_stationary(
    rho: DensityMatrix,
    h0: HermitianOperator,
    functional: HermitianOperator,
    kick,
    amplitudes: np.ndarray | None = None,
    tol: float = STATIONARY_TOL,
) -> bool:
    """True when the functional slope of rho vanishes for every kick in the family.

    Checks |Tr[rho U(a)+ [H0, B] U(a)]| < tol over the amplitude grid (the
    grid includes a = 0, covering the pre-kick slope).  Fixed points of the
    greedy iteration all pass this test.
    """
    if amplitudes is None:
        amplitudes = DEFAULT_AMPLITUDE_GRID
    ops = _rotated_commutators(h0, functional, kick, np.asarray(amplitudes, dtype=float))
    for op in ops:
        if abs(complex(np.sum(rho.matrix * op.T))) > tol:
            return False
    return True
