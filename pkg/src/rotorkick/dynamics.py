"""Sudden-kick pulse trains: free propagation, greedy kick scheduling, diagnostics.

A train alternates exact free evolution with instantaneous unitary kicks
exp(i A O), O being the process observable.  The greedy schedules fire a
kick whenever the driving functional (observable expectation for S1,
normalized overlap with the target state for S2) reaches its global maximum
within one free-evolution period.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import Basis, check_process_kind
from .evolution import PERIOD, LevelSetMeasure, TraceSeries, global_max, measure_above
from .operators import DensityMatrix, HermitianOperator, kick_unitary, observable_matrix
from .target import TargetState

SLOPE_TOL = 1e-10

S1 = "S1"
S2 = "S2"
STRATEGIES = (S1, S2)

IDEALIZED = "idealized"
PHYSICAL = "physical"
KICK_MODES = (IDEALIZED, PHYSICAL)


def _diagonal_energies(h0: HermitianOperator) -> np.ndarray:
    off = h0.matrix - np.diag(np.diag(h0.matrix))
    if np.any(off != 0):
        raise ValueError("h0 must be diagonal in the stored basis")
    return np.diag(h0.matrix).real.copy()


def free_propagate(rho: DensityMatrix, h0: HermitianOperator, t: float) -> DensityMatrix:
    """Exact free evolution: rho_ab -> rho_ab * exp(-i (E_a - E_b) t)."""
    energies = _diagonal_energies(h0)
    phase = np.exp(-1j * energies * t)
    mat = rho.matrix * np.outer(phase, phase.conj())
    return DensityMatrix(rho.basis, mat, trace_target=rho.trace_target)


@dataclass(frozen=True, eq=False)
class KickSpec:
    """Template for a sudden kick exp(i * amplitude * operator).

    mode records whether the generator is the observable truncated to the
    control space ("idealized") or built on an enlarged simulation basis
    ("physical"); the generator itself is carried in `operator`.
    """

    amplitude: float
    kind: str
    mode: str
    operator: HermitianOperator

    def __post_init__(self) -> None:
        check_process_kind(self.kind)
        if self.mode not in KICK_MODES:
            raise ValueError(f"unknown kick mode {self.mode!r}")
        if not np.isfinite(self.amplitude):
            raise ValueError("kick amplitude must be finite")

    def unitary(self, amplitude: float | None = None) -> np.ndarray:
        a = self.amplitude if amplitude is None else amplitude
        return kick_unitary(self.operator, a)


def make_kick(basis: Basis, kind: str, amplitude: float, mode: str = IDEALIZED) -> KickSpec:
    """Kick whose generator is the process observable on the given basis."""
    return KickSpec(amplitude=amplitude, kind=kind, mode=mode, operator=observable_matrix(basis, kind))


def apply_kick(rho: DensityMatrix, kick: KickSpec, amplitude: float | None = None) -> DensityMatrix:
    """rho -> U rho U+ for the kick unitary; spectrum-preserving."""
    u = kick.unitary(amplitude)
    mat = u @ rho.matrix @ u.conj().T
    mat = 0.5 * (mat + mat.conj().T)  # scrub roundoff asymmetry
    return DensityMatrix(rho.basis, mat, trace_target=rho.trace_target)


def _slope(rho_matrix: np.ndarray, commutator: np.ndarray) -> float:
    # d/dt Tr[B rho(t)] = Re( i Tr[rho [H0, B]] ) under free evolution
    return float((1j * np.sum(rho_matrix * commutator.T)).real)


def post_kick_slope(
    rho: DensityMatrix,
    kick: KickSpec,
    h0: HermitianOperator,
    functional: HermitianOperator,
    amplitude: float | None = None,
) -> float:
    """Time derivative of Tr[functional rho(t)] immediately after kicking rho."""
    comm = h0.matrix @ functional.matrix - functional.matrix @ h0.matrix
    kicked = apply_kick(rho, kick, amplitude)
    return _slope(kicked.matrix, comm)


def find_next_global_max(
    rho: DensityMatrix,
    functional: HermitianOperator | DensityMatrix,
    h0: HermitianOperator,
    t_start: float = 0.0,
    n_samples: int = 4096,
) -> tuple[float, float, bool]:
    """Earliest global maximum of Tr[functional rho(t)] in [t_start, t_start + pi).

    rho is the state at t_start; the functional is an observable or a target
    state.  Returns (t_star, value, flat); a functional flat to 1e-14 reports
    t_start with the flag set.
    """
    energies = _diagonal_energies(h0)
    series = TraceSeries(rho.matrix, functional.matrix, energies)
    res = global_max(series, 0.0, n_samples=n_samples)
    return t_start + res.t, res.value, res.flat


def leakage(rho: DensityMatrix, j_max: int) -> float:
    """Population carried by states with j above the cutoff."""
    mask = rho.basis.j_values > j_max
    return float(np.diag(rho.matrix).real[mask].sum())


@dataclass
class PulseTrainRecord:
    """Outcome of one greedy train: per-kick data plus post-train figures of merit."""

    strategy: str
    kick_times: list[float] = field(default_factory=list)
    amplitudes: list[float] = field(default_factory=list)
    pre_kick_values: list[float] = field(default_factory=list)
    post_kick_slopes: list[float] = field(default_factory=list)
    maxima: list[float] = field(default_factory=list)
    stop_reason: str = ""
    warnings: list[str] = field(default_factory=list)
    final_state: DensityMatrix | None = None
    final_efficiency: float = float("nan")
    final_efficiency_time: float = float("nan")
    final_projection: float | None = None
    final_duration: LevelSetMeasure | None = None

    @property
    def n_kicks(self) -> int:
        return len(self.kick_times)

    def to_jsonable(self) -> dict:
        return {
            "strategy": self.strategy,
            "n_kicks": self.n_kicks,
            "times_over_Trot": [t / PERIOD for t in self.kick_times],
            "amplitudes": self.amplitudes,
            "maxima": self.maxima,
            "pre_kick_values": self.pre_kick_values,
            "post_kick_slopes": self.post_kick_slopes,
            "stop_reason": self.stop_reason,
            "warnings": self.warnings,
            "final_efficiency": self.final_efficiency,
            "final_efficiency_time_over_Trot": self.final_efficiency_time / PERIOD,
            "final_projection": self.final_projection,
            "final_duration_above": None
            if self.final_duration is None
            else {"total": self.final_duration.total, "longest": self.final_duration.longest},
        }


@dataclass
class TimeSeries:
    """Sampled Tr[O rho(t)] and target overlap along a train, with kick markers."""

    times: np.ndarray
    expectation: np.ndarray
    projection: np.ndarray | None
    kick_flags: np.ndarray


class _SeriesAccumulator:
    """Collect samples segment by segment; each segment has its own series origin."""

    def __init__(self, points_per_period: int, track_projection: bool):
        self.step = PERIOD / points_per_period
        self.track_projection = track_projection
        self.times: list[float] = []
        self.expect: list[float] = []
        self.project: list[float] = []
        self.flags: list[int] = []
        self._next_tick = 0.0

    def _append(self, t: float, origin: float, exp_series, proj_series, flag: int) -> None:
        tau = t - origin
        self.times.append(t)
        self.expect.append(exp_series.value(tau))
        self.project.append(proj_series.value(tau) if proj_series is not None else np.nan)
        self.flags.append(flag)

    def segment(self, origin: float, t_to: float, exp_series, proj_series) -> None:
        """Grid samples in [origin, t_to) evaluated from the state valid at origin."""
        while self._next_tick < t_to - 1e-15:
            if self._next_tick >= origin - 1e-15:
                self._append(self._next_tick, origin, exp_series, proj_series, 0)
            self._next_tick += self.step

    def event(self, t: float, origin: float, exp_series, proj_series, flag: int) -> None:
        self._append(t, origin, exp_series, proj_series, flag)

    def build(self) -> TimeSeries:
        return TimeSeries(
            times=np.array(self.times),
            expectation=np.array(self.expect),
            projection=np.array(self.project) if self.track_projection else None,
            kick_flags=np.array(self.flags, dtype=int),
        )


def run_strategy(
    rho0: DensityMatrix,
    strategy: str,
    kick: KickSpec,
    h0: HermitianOperator,
    target: TargetState | None = None,
    observable: HermitianOperator | None = None,
    max_kicks: int = 15,
    gain_tol: float = 1e-4,
    duration_threshold: float = 0.5,
    leak_guard_j: int | None = None,
    points_per_period: int = 2048,
) -> tuple[PulseTrainRecord, TimeSeries]:
    """Run a greedy pulse train and sample the resulting dynamics.

    S1 drives on Tr[O rho], S2 on Tr[rho_F rho] / Tr[rho_F^2]; both fire the
    next kick at the earliest global maximum of the driving functional within
    one free-evolution period.  The kick sign flips per kick when -A yields a
    larger post-kick slope.  The train stops at max_kicks, or earlier when
    the gain between consecutive maxima falls below gain_tol (relative) while
    no kick sign can produce a slope above 1e-10, i.e. at a fixed point of
    the iteration.  The returned series extends one full period past the last
    kick.

    `observable` is the operator the strategy drives on and the efficiency is
    measured with; it defaults to the kick generator.  When the dynamics runs
    in an enlarged simulation space, pass the control-space observable zero-
    padded into that space, so that both propagations chase the same figure
    of merit.  leak_guard_j, when set, attaches a warning whenever the shells
    above it hold more than 1e-4 population after a kick.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == S2 and target is None:
        raise ValueError("strategy S2 requires a target state")
    if max_kicks < 0:
        raise ValueError("max_kicks must be non-negative")
    if target is not None and target.rho.basis.dim != rho0.dim:
        raise ValueError("target state and initial state live on different bases")

    energies = _diagonal_energies(h0)
    obs = observable if observable is not None else kick.operator
    if obs.dim != rho0.dim:
        raise ValueError("observable and initial state live on different bases")
    proj_matrix = None
    if target is not None:
        proj_matrix = target.rho.matrix / target.rho.purity()
    drive_matrix = obs.matrix if strategy == S1 else proj_matrix
    comm = h0.matrix @ drive_matrix - drive_matrix @ h0.matrix

    def series_pair(state: DensityMatrix):
        exp_s = TraceSeries(state.matrix, obs.matrix, energies)
        proj_s = TraceSeries(state.matrix, proj_matrix, energies) if proj_matrix is not None else None
        return exp_s, proj_s

    record = PulseTrainRecord(strategy=strategy)
    acc = _SeriesAccumulator(points_per_period, track_projection=proj_matrix is not None)
    rho = rho0
    t_now = 0.0
    prev_max = float(np.sum(rho.matrix * drive_matrix.T).real)

    for _ in range(max_kicks):
        drive_series = TraceSeries(rho.matrix, drive_matrix, energies)
        res = global_max(drive_series, 0.0, n_samples=4096)
        t_star = t_now + res.t
        if record.kick_times and t_star <= record.kick_times[-1]:
            t_star = record.kick_times[-1] + 1e-9  # keep kick times strictly increasing
        record.maxima.append(res.value)

        at_max = free_propagate(rho, h0, t_star - t_now)
        kicked_plus = apply_kick(at_max, kick, kick.amplitude)
        kicked_minus = apply_kick(at_max, kick, -kick.amplitude)
        slope_plus = _slope(kicked_plus.matrix, comm)
        slope_minus = _slope(kicked_minus.matrix, comm)

        gain = res.value - prev_max
        if gain < gain_tol * max(abs(prev_max), 1e-30) and max(abs(slope_plus), abs(slope_minus)) < SLOPE_TOL:
            record.stop_reason = "converged"
            break

        exp_s, proj_s = series_pair(rho)
        acc.segment(t_now, t_star, exp_s, proj_s)

        if slope_minus > slope_plus and max(abs(slope_plus), abs(slope_minus)) >= SLOPE_TOL:
            amplitude, rho, slope = -kick.amplitude, kicked_minus, slope_minus
        else:
            amplitude, rho, slope = kick.amplitude, kicked_plus, slope_plus
        t_now = t_star
        prev_max = res.value

        record.kick_times.append(t_star)
        record.amplitudes.append(amplitude)
        record.pre_kick_values.append(res.value)
        record.post_kick_slopes.append(slope)

        exp_s, proj_s = series_pair(rho)
        acc.event(t_star, t_star, exp_s, proj_s, flag=1)

        if leak_guard_j is not None:
            shell = leakage(rho, leak_guard_j)
            if shell > 1e-4:
                record.warnings.append(
                    f"population {shell:.3e} above j={leak_guard_j} after kick {record.n_kicks}"
                )
    else:
        record.stop_reason = "max_kicks"

    # post-train window: one full period beyond the last event
    exp_s, proj_s = series_pair(rho)
    acc.segment(t_now, t_now + PERIOD, exp_s, proj_s)
    acc.event(t_now + PERIOD, t_now, exp_s, proj_s, flag=0)

    final_max = global_max(exp_s, 0.0)
    record.final_state = rho
    record.final_efficiency = final_max.value
    record.final_efficiency_time = t_now + final_max.t
    if proj_s is not None:
        record.final_projection = global_max(proj_s, 0.0).value
    record.final_duration = measure_above(exp_s, duration_threshold, t_anchor=final_max.t)
    # close the maxima sequence with the post-train maximum of the driving functional
    record.maxima.append(final_max.value if strategy == S1 else record.final_projection)
    return record, acc.build()
