"""LP instance data model: constraints, normalization, residual checks, solver config."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np


class Sense(Enum):
    """Constraint sense. LE/LT inputs are flipped to GE/GT at parse time."""

    GE = ">="
    GT = ">"
    EQ = "="


class Direction(Enum):
    MIN = "min"
    MAX = "max"


class Verdict(Enum):
    FEASIBLE = "FEASIBLE"
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    STALLED = "STALLED"


class ZeroNormalError(ValueError):
    """A constraint normal is (numerically) the zero vector."""

    def __init__(self, index: int | None = None):
        self.index = index
        msg = "zero normal vector"
        if index is not None:
            msg = f"constraint {index}: zero normal vector"
        super().__init__(msg)


class DimensionMismatchError(ValueError):
    pass


def _as_vector(values, name: str = "vector") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Constraint:
    """One half-space (or hyperplane): normal . x  <sense>  offset.

    The normal points into the feasible side for GE/GT. Solvers require unit
    normals; use normalize() on a whole program to enforce that.
    """

    normal: np.ndarray
    offset: float
    sense: Sense = Sense.GE

    def __post_init__(self):
        normal = _as_vector(self.normal, "constraint normal")
        if float(np.linalg.norm(normal)) == 0.0:
            raise ZeroNormalError()
        normal = normal.copy()
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def is_unit(self) -> bool:
        return abs(float(np.linalg.norm(self.normal)) - 1.0) <= 1e-12


@dataclass(frozen=True)
class Objective:
    direction: Direction
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = _as_vector(self.coefficients, "objective coefficients").copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)


@dataclass(frozen=True)
class LinearProgram:
    """An LP instance: `n` variables, `m` constraints, optional linear objective.

    Immutable after construction; safe to share across concurrent solves.
    """

    dimension: int
    constraints: tuple[Constraint, ...]
    objective: Optional[Objective] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        constraints = tuple(self.constraints)
        if len(constraints) < 1:
            raise ValueError("at least one constraint is required")
        for i, c in enumerate(constraints):
            if c.normal.shape[0] != self.dimension:
                raise DimensionMismatchError(
                    f"constraint {i} has normal of length {c.normal.shape[0]}, expected {self.dimension}"
                )
        if self.objective is not None and self.objective.coefficients.shape[0] != self.dimension:
            raise DimensionMismatchError("objective length does not match dimension")
        object.__setattr__(self, "constraints", constraints)

    @classmethod
    def from_arrays(cls, normals, offsets, senses=None, objective: Objective | None = None) -> "LinearProgram":
        """Build from a dense row matrix; raises ZeroNormalError with the row index."""
        normals = np.asarray(normals, dtype=float)
        if normals.ndim != 2:
            raise DimensionMismatchError("normals must be a 2-d array")
        offsets = np.asarray(offsets, dtype=float).reshape(-1)
        m, n = normals.shape
        if offsets.shape[0] != m:
            raise DimensionMismatchError("offsets length does not match row count")
        if senses is None:
            senses = [Sense.GE] * m
        rows = []
        for i in range(m):
            try:
                rows.append(Constraint(normals[i], offsets[i], senses[i]))
            except ZeroNormalError:
                raise ZeroNormalError(i) from None
        return cls(n, tuple(rows), objective)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    @property
    def is_normalized(self) -> bool:
        return all(c.is_unit for c in self.constraints)

    def matrix(self) -> np.ndarray:
        return np.array([c.normal for c in self.constraints], dtype=float)

    def offsets(self) -> np.ndarray:
        return np.array([c.offset for c in self.constraints], dtype=float)


def normalize(lp: LinearProgram, geom_tol: float = 1e-9) -> LinearProgram:
    """Rescale every constraint so its normal has unit Euclidean norm.

    The satisfaction set of each constraint is unchanged (both sides are
    divided by a positive number). Idempotent.
    """
    rows = []
    for i, c in enumerate(lp.constraints):
        norm = float(np.linalg.norm(c.normal))
        if norm <= geom_tol:
            raise ZeroNormalError(i)
        rows.append(Constraint(c.normal / norm, c.offset / norm, c.sense))
    return LinearProgram(lp.dimension, tuple(rows), lp.objective)


def sense_satisfied(sense: Sense, distance: float, feas_tol: float) -> bool:
    """Whether a single signed distance satisfies its constraint sense."""
    if sense is Sense.GE:
        return distance >= -feas_tol
    if sense is Sense.GT:
        return distance > feas_tol
    return abs(distance) <= feas_tol


def check_point(lp: LinearProgram, p, feas_tol: float = 1e-8) -> bool:
    """True iff `p` satisfies every constraint of the (normalized) program."""
    p = _as_vector(p, "point")
    if p.shape[0] != lp.dimension:
        raise DimensionMismatchError(f"point has length {p.shape[0]}, expected {lp.dimension}")
    for c in lp.constraints:
        d = float(c.normal @ p - c.offset)
        if not sense_satisfied(c.sense, d, feas_tol):
            return False
    return True


@dataclass
class SolverConfig:
    """Tunables for the direction-search solver.

    epsilon is the ball radius. epsilon == 0.0 is accepted only to reproduce
    the known ball-less failure mode in regression tests; any positive value
    must exceed geom_tol. Iteration caps default to 10*m*n (outer) and
    100*n (inner) when left unset.
    """

    epsilon: float = 1e-2
    geom_tol: float = 1e-9
    feas_tol: float = 1e-8
    max_outer_iters: Optional[int] = None
    max_inner_iters: Optional[int] = None
    big_M_growth: float = 8.0
    max_M_escalations: int = 6

    def __post_init__(self):
        if self.geom_tol <= 0:
            raise ValueError("geom_tol must be positive")
        if self.feas_tol <= 0:
            raise ValueError("feas_tol must be positive")
        if self.epsilon != 0.0 and self.epsilon <= self.geom_tol:
            raise ValueError("epsilon must exceed geom_tol (or be exactly 0)")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.big_M_growth <= 1:
            raise ValueError("big_M_growth must exceed 1")
        if self.max_M_escalations < 1:
            raise ValueError("max_M_escalations must be positive")
        for cap in (self.max_outer_iters, self.max_inner_iters):
            if cap is not None and cap < 1:
                raise ValueError("iteration caps must be positive")

    def outer_cap(self, lp: LinearProgram) -> int:
        if self.max_outer_iters is not None:
            return self.max_outer_iters
        return 10 * lp.num_constraints * lp.dimension

    def inner_cap(self, lp: LinearProgram) -> int:
        if self.max_inner_iters is not None:
            return self.max_inner_iters
        return 100 * lp.dimension


@dataclass
class SolveResult:
    """Outcome of a solve: verdict plus witness point and diagnostics."""

    verdict: Verdict
    point: Optional[np.ndarray] = None
    objective_value: Optional[float] = None
    iterations: int = 0
    epsilon_final: float = 0.0
    diagnostics: tuple[str, ...] = field(default_factory=tuple)
