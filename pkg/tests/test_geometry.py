import numpy as np
import pytest

from gutterlp.geometry import (
    Ray,
    first_obstacle,
    project_onto_intersection,
    ray_hit,
    signed_distance,
)
from gutterlp.gram import GutterBasis
from gutterlp.model import Constraint, DimensionMismatchError, LinearProgram, Sense


def plane(normal, offset, sense=Sense.GE):
    return Constraint(np.asarray(normal, float), offset, sense)


def basis_of(rows, dimension):
    basis = GutterBasis(dimension)
    for k, (normal, offset) in enumerate(rows):
        assert basis.append_row(k, np.asarray(normal, float), offset)
    return basis


class TestSignedDistance:
    def test_positive_side(self):
        assert signed_distance(plane([0.6, 0.8], 2.0), [5.0, 0.0]) == pytest.approx(1.0)

    def test_negative_side(self):
        assert signed_distance(plane([0.6, 0.8], 2.0), [0.0, 0.0]) == pytest.approx(-2.0)

    def test_on_plane(self):
        assert signed_distance(plane([0.6, 0.8], 2.0), [2.0, 1.0]) == pytest.approx(0.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            signed_distance(plane([1.0, 0.0], 0.0), [1.0])


class TestRayHit:
    def test_simple_hit(self):
        hit = ray_hit(plane([1.0, 0.0], 2.0), Ray(np.array([0.0, 1.0]), np.array([1.0, 0.0])))
        assert hit is not None
        t, point = hit
        assert t == pytest.approx(2.0)
        assert np.allclose(point, [2.0, 1.0])

    def test_parallel_is_none(self):
        assert ray_hit(plane([1.0, 0.0], 2.0),
                       Ray(np.array([0.0, 1.0]), np.array([0.0, 1.0]))) is None

    def test_behind_is_none(self):
        assert ray_hit(plane([1.0, 0.0], 2.0),
                       Ray(np.array([3.0, 0.0]), np.array([1.0, 0.0]))) is None

    def test_hit_point_on_plane(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            normal = rng.standard_normal(4)
            normal /= np.linalg.norm(normal)
            c = plane(normal, float(rng.uniform(-2, 2)))
            direction = rng.standard_normal(4)
            direction /= np.linalg.norm(direction)
            hit = ray_hit(c, Ray(rng.standard_normal(4), direction))
            if hit is not None:
                assert abs(signed_distance(c, hit[1])) <= 1e-9


class TestFirstObstacle:
    def lp(self):
        return LinearProgram(2, (plane([1.0, 0.0], 2.0), plane([1.0, 0.0], 5.0),
                                 plane([0.0, 1.0], 1.0)))

    def test_closest_wins(self):
        ray = Ray(np.zeros(2), np.array([1.0, 0.0]))
        hit = first_obstacle(self.lp(), [0, 1], ray)
        assert hit.constraint_index == 0
        assert hit.t == pytest.approx(2.0)

    def test_candidate_restriction(self):
        ray = Ray(np.zeros(2), np.array([1.0, 0.0]))
        hit = first_obstacle(self.lp(), [1], ray)
        assert hit.constraint_index == 1
        assert hit.t == pytest.approx(5.0)

    def test_no_hit(self):
        ray = Ray(np.zeros(2), np.array([1.0, 0.0]))
        assert first_obstacle(self.lp(), [2], ray) is None

    def test_tie_breaks_to_lowest_index(self):
        lp = LinearProgram(2, (plane([1.0, 0.0], 2.0), plane([1.0, 0.0], 2.0)))
        ray = Ray(np.zeros(2), np.array([1.0, 0.0]))
        assert first_obstacle(lp, [0, 1], ray).constraint_index == 0
        assert first_obstacle(lp, [1, 0], ray).constraint_index == 0


class TestProjection:
    def test_single_plane(self):
        basis = basis_of([(np.array([1.0, 0.0]), 1.0)], 2)
        assert np.allclose(project_onto_intersection(basis, [0.0, 0.0], [0.0]), [1.0, 0.0])

    def test_axis_intersection(self):
        basis = basis_of([([0.0, 1.0, 0.0], 0.0), ([0.0, 0.0, 1.0], 0.0)], 3)
        q = project_onto_intersection(basis, [1.0, 2.0, 3.0], [0.0, 0.0])
        assert np.allclose(q, [1.0, 0.0, 0.0])

    def test_offset_target(self):
        basis = basis_of([([1.0, 0.0], 1.0)], 2)
        q = project_onto_intersection(basis, [0.0, 0.0], [0.5])
        assert np.allclose(q, [1.5, 0.0])

    def test_idempotent(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            t = int(rng.integers(1, n))
            rows = rng.standard_normal((t, n))
            rows /= np.linalg.norm(rows, axis=1)[:, None]
            basis = GutterBasis(n)
            for k in range(t):
                if not basis.append_row(k, rows[k], float(rng.uniform(-1, 1))):
                    continue
            targets = rng.uniform(-0.5, 0.5, basis.size)
            p = rng.standard_normal(n)
            q1 = project_onto_intersection(basis, p, targets)
            q2 = project_onto_intersection(basis, q1, targets)
            assert np.linalg.norm(q2 - q1) <= 1e-12

    def test_targets_achieved(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            t = int(rng.integers(1, n))
            rows = rng.standard_normal((t, n))
            rows /= np.linalg.norm(rows, axis=1)[:, None]
            basis = GutterBasis(n)
            for k in range(t):
                basis.append_row(k, rows[k], float(rng.uniform(-1, 1)))
            targets = rng.uniform(-0.5, 0.5, basis.size)
            p = rng.standard_normal(n)
            q = project_onto_intersection(basis, p, targets)
            achieved = basis.normals_matrix() @ q - basis.offsets_vector()
            assert np.max(np.abs(achieved - targets)) <= 1e-9

    def test_correction_in_row_space(self):
        # the displacement p - q must be orthogonal to the intersection directions
        rng = np.random.default_rng(23)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            t = int(rng.integers(1, n))
            rows = rng.standard_normal((t, n))
            rows /= np.linalg.norm(rows, axis=1)[:, None]
            basis = GutterBasis(n)
            for k in range(t):
                basis.append_row(k, rows[k], 0.0)
            G = basis.normals_matrix()
            _, _, vh = np.linalg.svd(G)
            null_space = vh[basis.size:]
            p = rng.standard_normal(n)
            q = project_onto_intersection(basis, p, np.zeros(basis.size))
            shift = p - q
            for w in null_space:
                bound = 1e-9 * max(np.linalg.norm(shift) * np.linalg.norm(w), 1e-30)
                assert abs(float(shift @ w)) <= max(bound, 1e-12)

    def test_empty_basis_is_identity(self):
        basis = GutterBasis(3)
        p = np.array([1.0, 2.0, 3.0])
        assert np.allclose(project_onto_intersection(basis, p, []), p)
