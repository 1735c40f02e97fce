"""Walk through one feasibility solve, narrating every geometric event.

Two constraints in the plane: a floor (y >= 0) and a wall (x >= 2). The start
satisfies the floor but not the wall, so the ball moves straight at the wall
plane and stops an epsilon past it.
"""
import numpy as np

from gutterlp import LinearProgram, SolverConfig, solve_feasibility

lp = LinearProgram.from_arrays(
    np.array([[0.0, 1.0],
              [1.0, 0.0]]),
    np.array([0.0, 2.0]),
)

events = []
result = solve_feasibility(lp, SolverConfig(epsilon=0.01),
                           start=np.array([0.0, 1.0]), trace=events.append)

print("verdict:", result.verdict.value)
print("point:  ", result.point)
print("inner iterations:", result.iterations)
print()
print("event log:")
for ev in events:
    print(f"  [{ev.iteration}] {ev.kind.value:<18} p0={np.round(ev.p0, 4)} "
          f"gutter={list(ev.gutter_indices)} {ev.detail}")

# A harder walk: three planes where the straight path is blocked and the ball
# has to slide along a wall before it can reach the violated plane.
print()
print("--- with an obstacle in the way ---")
lp2 = LinearProgram.from_arrays(
    np.array([[0.0, 1.0],
              [0.0, 1.0],
              [0.6, -0.8]]),
    np.array([0.0, 0.006, 0.6]),
)
events = []
result = solve_feasibility(lp2, SolverConfig(epsilon=0.01),
                           start=np.array([-2.0, 1.5]), trace=events.append)
print("verdict:", result.verdict.value, " point:", np.round(result.point, 4))
for ev in events:
    print(f"  [{ev.iteration}] {ev.kind.value:<18} p0={np.round(ev.p0, 4)} "
          f"gutter={list(ev.gutter_indices)} {ev.detail}")
