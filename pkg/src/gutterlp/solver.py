"""Feasibility and optimum search by sliding an epsilon-ball along constraint planes.

The solver repeatedly picks the most-violated constraint and moves the ball
center toward its plane. Satisfied planes encountered on the way either push
the center back to an epsilon standoff (far obstacles) or join the "gutter"
of touching planes (near obstacles); movement then continues parallel to the
whole gutter, in the direction that approaches the target fastest. When no
such direction remains, the ball is either shrunk to fit a narrow region,
switched to equality mode for non-full-dimensional regions, or the target is
declared unresolvable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .geometry import Ray, project_onto_intersection, signed_distance
from .gram import GutterBasis
from .model import (
    Constraint,
    DimensionMismatchError,
    Direction,
    LinearProgram,
    Sense,
    SolveResult,
    SolverConfig,
    Verdict,
    _as_vector,
    check_point,
    normalize,
    sense_satisfied,
)


class EventKind(Enum):
    SELECT_TARGET = "SELECT_TARGET"
    MOVE = "MOVE"
    RESOLVED = "RESOLVED"
    OBSTACLE_BACKOFF = "OBSTACLE_BACKOFF"
    GUTTER_APPEND = "GUTTER_APPEND"
    GUTTER_SKIP_DEGENERATE = "GUTTER_SKIP_DEGENERATE"
    SHRINK_BALL = "SHRINK_BALL"
    EQUALITY_SWITCH = "EQUALITY_SWITCH"
    STALL = "STALL"
    GUTTER_FULL = "GUTTER_FULL"
    M_ESCALATION = "M_ESCALATION"


@dataclass(frozen=True)
class TraceEvent:
    """One geometric event; p0 is the ball center after the event."""

    iteration: int
    kind: EventKind
    p0: tuple[float, ...]
    dir: tuple[float, ...]
    gutter_indices: tuple[int, ...]
    detail: str = ""


TraceSink = Optional[Callable[[TraceEvent], None]]


class InconsistentEqualityError(Exception):
    """Equality constraints admit no common point."""


@dataclass
class SolverState:
    p0: np.ndarray
    epsilon: float
    gutter: GutterBasis
    dir: Optional[np.ndarray] = None
    target_index: int = -1
    pinned_eq: set[int] = field(default_factory=set)
    outer_iter: int = 0
    inner_iter: int = 0


class ResolveOutcome(Enum):
    RESOLVED = "resolved"
    GUTTER_FULL = "gutter-full"
    STALL = "stall"


class RepairOutcome(Enum):
    SHRUNK_BALL = "shrunk-ball"
    EQUALITY_MODE = "equality-mode"
    INFEASIBLE = "infeasible"
    FAILED = "failed"


def _emit(trace: TraceSink, state: SolverState, kind: EventKind, detail: str = "",
          dir_vec: Optional[np.ndarray] = None) -> None:
    if trace is None:
        return
    d = dir_vec if dir_vec is not None else state.dir
    trace(TraceEvent(
        iteration=state.inner_iter,
        kind=kind,
        p0=tuple(float(x) for x in state.p0),
        dir=tuple(float(x) for x in d) if d is not None else tuple([0.0] * state.p0.shape[0]),
        gutter_indices=state.gutter.indices,
        detail=detail,
    ))


def initial_point(lp: LinearProgram, geom_tol: float = 1e-9, feas_tol: float = 1e-8) -> np.ndarray:
    """Default start: the origin, projected onto the equality planes if any.

    Dependent but consistent equality rows are dropped from the projection;
    an equality left unsatisfied by the projection means the equalities are
    contradictory and InconsistentEqualityError is raised.
    """
    eq_indices = [i for i, c in enumerate(lp.constraints) if c.sense is Sense.EQ]
    origin = np.zeros(lp.dimension)
    if not eq_indices:
        return origin
    point, ok = _project_onto_planes(lp, eq_indices, origin, geom_tol, feas_tol)
    if not ok:
        raise InconsistentEqualityError("equality constraints are contradictory")
    return point


def _project_onto_planes(lp: LinearProgram, indices, p, geom_tol: float,
                         feas_tol: float) -> tuple[np.ndarray, bool]:
    """Project p onto the joint intersection of the given planes.

    Returns (point, consistent); consistent is False when a dropped dependent
    row is not satisfied by the projection, i.e. the planes have no common point.
    """
    basis = GutterBasis(lp.dimension)
    for i in sorted(indices):
        c = lp.constraints[i]
        basis.append_row(i, c.normal, c.offset, geom_tol)
    q = project_onto_intersection(basis, p, np.zeros(basis.size))
    for i in sorted(indices):
        if abs(signed_distance(lp.constraints[i], q)) > 10 * feas_tol:
            return q, False
    return q, True


def _pinned_basis(lp: LinearProgram, pinned: set[int], geom_tol: float) -> GutterBasis:
    basis = GutterBasis(lp.dimension)
    for i in sorted(pinned):
        c = lp.constraints[i]
        basis.append_row(i, c.normal, c.offset, geom_tol)
    return basis


def _slide_direction(lp: LinearProgram, basis: GutterBasis, p0: np.ndarray,
                     target: int, geom_tol: float,
                     epsilon: float = 0.0) -> tuple[Optional[np.ndarray], float]:
    """Movement direction parallel to the gutter that approaches the target plane.

    Equivalent to normalizing P3 - P1, where P1 and P3 are the projections of
    the center and of its target-plane foot onto the gutter intersection; the
    second value is |P3 - P1|, whose vanishing signals "no slope on the gutter".
    For a strict target sitting on its own plane the remaining travel is the
    gap up to the epsilon standoff instead of the plane distance.
    """
    a = lp.constraints[target].normal
    if basis.size == 0:
        proj = a.copy()
    else:
        G = basis.normals_matrix()
        proj = a - basis.correction(G @ a)
    norm = float(np.linalg.norm(proj))
    d = signed_distance(lp.constraints[target], p0)
    travel = abs(d) if d < 0 else max(epsilon - d, 0.0)
    slope = travel * norm
    if norm <= geom_tol or slope <= geom_tol:
        return None, slope
    direction = proj / norm
    if basis.size:
        # one re-orthogonalization pass keeps dir-gutter dot products at rounding level
        G = basis.normals_matrix()
        for _ in range(3):
            drift = G @ direction
            if float(np.max(np.abs(drift))) <= 1e-12:
                break
            direction = direction - basis.correction(drift)
            norm = float(np.linalg.norm(direction))
            if norm <= geom_tol:
                return None, slope
            direction = direction / norm
    return direction, slope


def _satisfied_snapshot(lp: LinearProgram, state: SolverState, config: SolverConfig) -> list[int]:
    out = []
    for j, c in enumerate(lp.constraints):
        if j == state.target_index or j in state.pinned_eq:
            continue
        if sense_satisfied(c.sense, signed_distance(c, state.p0), config.feas_tol):
            out.append(j)
    return out


def resolve_constraint(lp: LinearProgram, state: SolverState, config: SolverConfig,
                       trace: TraceSink = None) -> tuple[ResolveOutcome, str]:
    """Drive the ball until the target constraint is satisfied or progress dies.

    Expects state.target_index violated at state.p0 and state.gutter holding
    only the pinned equality rows. Mutates state in place.
    """
    i = state.target_index
    target = lp.constraints[i]
    eps = state.epsilon
    geom_tol = config.geom_tol
    feas_tol = config.feas_tol

    satisfied = _satisfied_snapshot(lp, state, config)
    direction, _ = _slide_direction(lp, state.gutter, state.p0, i, geom_tol, eps)
    if direction is None:
        _emit(trace, state, EventKind.STALL, "no-slope at cycle start", dir_vec=np.zeros(lp.dimension))
        return ResolveOutcome.STALL, "no-slope"
    state.dir = direction
    skip: set[int] = set()
    inner_cap = config.inner_cap(lp)

    while True:
        if sense_satisfied(target.sense, signed_distance(target, state.p0), feas_tol):
            _emit(trace, state, EventKind.RESOLVED, f"target={i}")
            return ResolveOutcome.RESOLVED, "resolved"
        if state.gutter.size >= lp.dimension:
            _emit(trace, state, EventKind.GUTTER_FULL, f"target={i} rows={state.gutter.size}",
                  dir_vec=np.zeros(lp.dimension))
            return ResolveOutcome.GUTTER_FULL, "gutter-full"

        state.inner_iter += 1
        if state.inner_iter > inner_cap:
            _emit(trace, state, EventKind.STALL, "inner-iteration-cap",
                  dir_vec=np.zeros(lp.dimension))
            return ResolveOutcome.STALL, "inner-iteration-cap"

        ray = Ray(state.p0, state.dir)
        in_gutter = set(state.gutter.indices)
        hits: list[tuple[float, int, float]] = []
        for j in satisfied:
            if j in in_gutter or j in skip:
                continue
            c = lp.constraints[j]
            slope_j = float(c.normal @ state.dir)
            if abs(slope_j) <= geom_tol:
                continue
            t = -signed_distance(c, state.p0) / slope_j
            if t > geom_tol:
                hits.append((t, j, slope_j))
        slope_i = float(target.normal @ state.dir)
        d_i = signed_distance(target, state.p0)
        if abs(slope_i) > geom_tol:
            if d_i < -feas_tol:
                t = -d_i / slope_i
            else:
                # strict target on its own plane: travel to the epsilon standoff
                t = (eps - d_i) / slope_i
            if t > geom_tol:
                hits.append((t, i, slope_i))
        if not hits:
            _emit(trace, state, EventKind.STALL, "unbounded-ray")
            return ResolveOutcome.STALL, "unbounded-ray"

        hits.sort(key=lambda h: (h[0], h[1]))
        t_first, j_first, slope_first = hits[0]

        if j_first == i:
            # the target comes first: land at the epsilon standoff past its plane,
            # stopping early on any satisfied plane crossed on the way
            if d_i < -feas_tol:
                t_end = t_first + (eps / slope_first if eps > 0 else 0.0)
            else:
                t_end = t_first
            for t_j, j, slope_j in hits[1:]:
                if j != i and slope_j < 0 and t_j < t_end:
                    t_end = t_j
                    break
            moved = ray.at(t_end)
            if not np.array_equal(moved, state.p0):
                state.p0 = moved
                _emit(trace, state, EventKind.MOVE, f"advance t={t_end:.9e}")
            continue

        j = j_first
        c_j = lp.constraints[j]
        d_j = signed_distance(c_j, state.p0)
        if d_j > eps + feas_tol:
            # far obstacle: retreat along the ray to an epsilon standoff, keep direction
            t_back = t_first - eps / abs(slope_first)
            moved = ray.at(t_back)
            if not np.array_equal(moved, state.p0):
                state.p0 = moved
                _emit(trace, state, EventKind.MOVE, f"advance t={t_back:.9e}")
            _emit(trace, state, EventKind.OBSTACLE_BACKOFF, f"obstacle={j}")
            continue

        # near obstacle: it touches the ball; put the center at the epsilon
        # standoff on the ray (never moving backward) and add it to the gutter
        t_place = t_first - (eps / abs(slope_first) if eps > 0 else 0.0)
        if t_place > 0:
            moved = ray.at(t_place)
            if not np.array_equal(moved, state.p0):
                state.p0 = moved
                _emit(trace, state, EventKind.MOVE, f"advance t={t_place:.9e}")
        appended = state.gutter.append_row(j, c_j.normal, c_j.offset, geom_tol)
        if not appended:
            skip.add(j)
            _emit(trace, state, EventKind.GUTTER_SKIP_DEGENERATE, f"plane={j}")
            continue
        if state.gutter.size >= lp.dimension:
            _emit(trace, state, EventKind.GUTTER_APPEND, f"plane={j}",
                  dir_vec=np.zeros(lp.dimension))
            continue
        direction, _ = _slide_direction(lp, state.gutter, state.p0, i, geom_tol, eps)
        if direction is None:
            _emit(trace, state, EventKind.GUTTER_APPEND, f"plane={j}",
                  dir_vec=np.zeros(lp.dimension))
            _emit(trace, state, EventKind.STALL, "no-slope",
                  dir_vec=np.zeros(lp.dimension))
            return ResolveOutcome.STALL, "no-slope"
        state.dir = direction
        skip.clear()
        _emit(trace, state, EventKind.GUTTER_APPEND, f"plane={j}")


def repair_or_conclude(lp: LinearProgram, state: SolverState, config: SolverConfig,
                       trace: TraceSink = None) -> RepairOutcome:
    """Handle a stalled or full gutter: shrink the ball, pin equalities, or give up.

    O is the projection of the center onto the gutter intersection. A strictly
    feasible O means the ball was too big: restart it halfway between O and the
    target plane with a radius that fits. O sitting on the target plane means
    the feasible region is flat there: hold target and gutter as equalities.
    Anything else leaves no way forward.
    """
    i = state.target_index
    target = lp.constraints[i]
    feas_tol = config.feas_tol
    basis = state.gutter

    origin_at = project_onto_intersection(basis, state.p0, np.zeros(basis.size))
    d_target_o = signed_distance(target, origin_at)

    if abs(d_target_o) <= feas_tol:
        new_pinned = set(state.pinned_eq) | {i} | set(basis.indices)
        point, ok = _project_onto_planes(lp, new_pinned, state.p0, config.geom_tol, feas_tol)
        if not ok:
            return RepairOutcome.INFEASIBLE
        state.pinned_eq = new_pinned
        state.p0 = point
        _emit(trace, state, EventKind.EQUALITY_SWITCH,
              f"pinned={sorted(new_pinned)}", dir_vec=np.zeros(lp.dimension))
        return RepairOutcome.EQUALITY_MODE

    others_ok = True
    for k, c in enumerate(lp.constraints):
        if k == i:
            continue
        if not sense_satisfied(c.sense, signed_distance(c, origin_at), feas_tol):
            others_ok = False
            break

    if others_ok and d_target_o > feas_tol:
        d_target_p = signed_distance(target, state.p0)
        if d_target_p >= -feas_tol:
            return RepairOutcome.FAILED
        appended = [(idx, a, b) for idx, a, b in basis.rows() if idx not in state.pinned_eq]
        if not appended:
            return RepairOutcome.FAILED
        s = d_target_o / (d_target_o - d_target_p)
        crossing = origin_at + s * (state.p0 - origin_at)
        center = 0.5 * (origin_at + crossing)
        new_eps = min(float(a @ center - b) for _, a, b in appended)
        if new_eps <= config.geom_tol:
            return RepairOutcome.FAILED
        state.epsilon = new_eps
        state.p0 = center
        _emit(trace, state, EventKind.SHRINK_BALL, f"epsilon={new_eps:.9e}",
              dir_vec=np.zeros(lp.dimension))
        return RepairOutcome.SHRUNK_BALL

    return RepairOutcome.INFEASIBLE


def _violations(lp: LinearProgram, p: np.ndarray, feas_tol: float) -> list[tuple[int, float]]:
    out = []
    for j, c in enumerate(lp.constraints):
        d = signed_distance(c, p)
        if not sense_satisfied(c.sense, d, feas_tol):
            out.append((j, d))
    return out


def _solve_feasibility_state(lp: LinearProgram, config: SolverConfig,
                             start, trace: TraceSink) -> tuple[SolveResult, SolverState]:
    lp = normalize(lp, config.geom_tol)
    diagnostics: list[str] = []
    pinned = {i for i, c in enumerate(lp.constraints) if c.sense is Sense.EQ}

    if start is None:
        try:
            p0 = initial_point(lp, config.geom_tol, config.feas_tol)
        except InconsistentEqualityError:
            result = SolveResult(Verdict.INFEASIBLE, iterations=0, epsilon_final=config.epsilon,
                                 diagnostics=("contradictory equality constraints",))
            return result, SolverState(np.zeros(lp.dimension), config.epsilon,
                                       GutterBasis(lp.dimension), pinned_eq=pinned)
    else:
        p0 = _as_vector(start, "start point").copy()
        if p0.shape[0] != lp.dimension:
            raise DimensionMismatchError(
                f"start point has length {p0.shape[0]}, expected {lp.dimension}")
        if pinned:
            p0, ok = _project_onto_planes(lp, pinned, p0, config.geom_tol, config.feas_tol)
            if not ok:
                result = SolveResult(Verdict.INFEASIBLE, iterations=0,
                                     epsilon_final=config.epsilon,
                                     diagnostics=("contradictory equality constraints",))
                return result, SolverState(p0, config.epsilon, GutterBasis(lp.dimension),
                                           pinned_eq=pinned)

    state = SolverState(p0=p0, epsilon=config.epsilon,
                        gutter=_pinned_basis(lp, pinned, config.geom_tol), pinned_eq=pinned)
    outer_cap = config.outer_cap(lp)

    while True:
        state.outer_iter += 1
        if state.outer_iter > outer_cap:
            diagnostics.append("outer-iteration-cap")
            return _result(Verdict.STALLED, state, diagnostics), state

        violated = _violations(lp, state.p0, config.feas_tol)
        if not violated:
            return _result(Verdict.FEASIBLE, state, diagnostics, point=state.p0), state

        selectable = [(d, j) for j, d in violated if j not in state.pinned_eq]
        if not selectable:
            diagnostics.append("all violated constraints are pinned equalities")
            return _result(Verdict.STALLED, state, diagnostics), state
        _, target = min(selectable, key=lambda item: (item[0], item[1]))
        state.target_index = target
        state.gutter = _pinned_basis(lp, state.pinned_eq, config.geom_tol)
        state.dir = None
        _emit(trace, state, EventKind.SELECT_TARGET,
              f"target={target} distance={dict((j, d) for j, d in violated)[target]:.9e}",
              dir_vec=np.zeros(lp.dimension))

        outcome, detail = resolve_constraint(lp, state, config, trace)
        if outcome is ResolveOutcome.RESOLVED:
            continue
        if state.gutter.size == 0:
            diagnostics.append(detail)
            return _result(Verdict.STALLED, state, diagnostics), state
        repair = repair_or_conclude(lp, state, config, trace)
        if repair is RepairOutcome.SHRUNK_BALL:
            continue
        if repair is RepairOutcome.EQUALITY_MODE:
            continue
        if repair is RepairOutcome.INFEASIBLE:
            diagnostics.append(f"unresolvable constraint {target} ({detail})")
            return _result(Verdict.INFEASIBLE, state, diagnostics), state
        diagnostics.append(f"repair failed for constraint {target} ({detail})")
        return _result(Verdict.STALLED, state, diagnostics), state


def _result(verdict: Verdict, state: SolverState, diagnostics: list[str],
            point: Optional[np.ndarray] = None,
            objective_value: Optional[float] = None) -> SolveResult:
    return SolveResult(
        verdict=verdict,
        point=None if point is None else point.copy(),
        objective_value=objective_value,
        iterations=state.inner_iter,
        epsilon_final=state.epsilon,
        diagnostics=tuple(diagnostics),
    )


def solve_feasibility(lp: LinearProgram, config: Optional[SolverConfig] = None,
                      start=None, trace: TraceSink = None) -> SolveResult:
    """Search for any point satisfying all constraints."""
    config = config or SolverConfig()
    result, _ = _solve_feasibility_state(lp, config, start, trace)
    return result


def solve_optimum(lp: LinearProgram, config: Optional[SolverConfig] = None,
                  start=None, trace: TraceSink = None) -> SolveResult:
    """Optimize the objective: feasibility first, then drive the objective plane.

    The objective is pushed by resolving an artificial constraint
    c_hat . x >= M; if the constraint keeps getting resolved, M grows
    geometrically until the problem is declared unbounded. A stall or a full
    gutter on the artificial constraint is the stopping condition; projecting
    the center onto the gutter then removes the epsilon gaps.
    """
    if lp.objective is None:
        raise ValueError("solve_optimum requires an objective")
    config = config or SolverConfig()
    lp_norm = normalize(lp, config.geom_tol)

    phase1, state = _solve_feasibility_state(lp_norm, config, start, trace)
    if phase1.verdict is not Verdict.FEASIBLE:
        return phase1

    c = lp_norm.objective.coefficients
    work_c = c if lp_norm.objective.direction is Direction.MAX else -c
    norm_c = float(np.linalg.norm(work_c))
    diagnostics = list(phase1.diagnostics)
    if norm_c <= config.geom_tol:
        diagnostics.append("objective is numerically zero; any feasible point is optimal")
        return _result(Verdict.OPTIMAL, state, diagnostics, point=state.p0,
                       objective_value=float(c @ state.p0))
    c_hat = work_c / norm_c

    m = lp_norm.num_constraints
    big_m = float(c_hat @ state.p0 + max(1.0, float(np.linalg.norm(state.p0))) * config.big_M_growth)
    escalations = 0
    cycles = 0
    cycle_cap = config.outer_cap(lp_norm)
    best_point: Optional[np.ndarray] = None
    best_height = -math.inf
    last_stall_height: Optional[float] = None
    last_detail = ""

    while cycles < cycle_cap:
        cycles += 1
        lp_aug = LinearProgram(
            lp_norm.dimension,
            lp_norm.constraints + (Constraint(c_hat, big_m, Sense.GE),),
            lp_norm.objective,
        )
        state.target_index = m
        state.gutter = _pinned_basis(lp_norm, state.pinned_eq, config.geom_tol)
        state.dir = None
        _emit(trace, state, EventKind.SELECT_TARGET,
              f"target={m} artificial M={big_m:.9e}", dir_vec=np.zeros(lp_norm.dimension))
        outcome, detail = resolve_constraint(lp_aug, state, config, trace)

        if outcome is ResolveOutcome.RESOLVED:
            if escalations >= config.max_M_escalations:
                diagnostics.append("objective still improving after all M escalations")
                return _result(Verdict.UNBOUNDED, state, diagnostics)
            escalations += 1
            big_m *= config.big_M_growth
            last_stall_height = None
            _emit(trace, state, EventKind.M_ESCALATION, f"M={big_m:.9e}",
                  dir_vec=np.zeros(lp_norm.dimension))
            continue

        # stalled or full gutter: take the gutter intersection as an optimum
        # candidate, then retry from here with a fresh gutter; a stall that
        # repeats without objective progress is the stopping condition
        last_detail = detail
        optimum = project_onto_intersection(state.gutter, state.p0, np.zeros(state.gutter.size))
        if check_point(lp_norm, optimum, config.feas_tol):
            height = float(c_hat @ optimum)
            if height > best_height:
                best_height = height
                best_point = optimum
        stall_height = float(c_hat @ state.p0)
        if last_stall_height is not None and \
                stall_height <= last_stall_height + 1e-9 * (1.0 + abs(stall_height)):
            break
        last_stall_height = stall_height

    if best_point is not None:
        diagnostics.append(f"optimum at {last_detail}")
        return _result(Verdict.OPTIMAL, state, diagnostics, point=best_point,
                       objective_value=float(c @ best_point))
    diagnostics.append(f"optimum extraction failed feasibility check ({last_detail})")
    return _result(Verdict.STALLED, state, diagnostics)
