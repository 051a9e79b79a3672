import random

import numpy as np
import pytest

from hermsurf.codes import (
    EvaluationCode,
    build_code,
    code_report,
    min_distance_enumerate,
    min_distance_geometric,
)
from hermsurf.forms import combination_values, form_from_vector, monomial_count, monomials
from hermsurf.hermitian import canonical_surface
from hermsurf.theorems import BudgetExceededError


@pytest.fixture(scope="module")
def s2():
    return canonical_surface(2)


@pytest.fixture(scope="module")
def s3():
    return canonical_surface(3)


def test_dimensions(s2, s3):
    assert build_code(s2, 1).k == 4
    assert build_code(s2, 2).k == 10
    assert build_code(s3, 1).k == 4
    code = build_code(s2, 1)
    assert code.n == 45
    assert code.matrix.shape == (4, 45)


def test_columns_follow_point_enumeration(s2):
    code = build_code(s2, 2)
    pts = [s2.geometry.points[int(i)] for i in s2.point_ids]
    f = s2.field
    for j in (0, 7, 44):
        for r, exps in enumerate(monomials(2)):
            val = 1
            for x, e in zip(pts[j], exps):
                val = f.mul(val, f.pow(x, e))
            assert int(code.matrix[r, j]) == val


def test_min_distance_small(s2, s3):
    assert min_distance_enumerate(build_code(s2, 1)) == 32
    assert min_distance_enumerate(build_code(s3, 1)) == 243


def test_geometric_prediction():
    assert min_distance_geometric(2, 1) == 32
    assert min_distance_geometric(2, 2) == 22
    assert min_distance_geometric(3, 2) == 210
    assert min_distance_geometric(3, 1) == 243
    with pytest.raises(ValueError):
        min_distance_geometric(2, 0)
    with pytest.raises(ValueError):
        min_distance_geometric(2, 4)


def test_budget_guard(s3):
    with pytest.raises(BudgetExceededError):
        min_distance_enumerate(build_code(s3, 2), budget=10_000)


def test_weight_distribution_d1(s2):
    d_min, dist = min_distance_enumerate(build_code(s2, 1), collect_weights=True)
    assert d_min == 32
    # 45 tangent planes give weight 32, the 40 other planes weight 36,
    # each class counts q^2 - 1 = 3 codewords, plus the zero word
    assert dist == {0: 1, 32: 45 * 3, 36: 40 * 3}
    assert sum(dist.values()) == 4**4


def test_codeword_weight_identity(s2):
    """weight + |X_F| = n for arbitrary coefficient vectors."""
    f = s2.field
    code = build_code(s2, 2)
    rng = random.Random(27)
    surf_pts = s2.geometry.arr[s2.point_ids]
    for _ in range(200):
        vec = [rng.randrange(f.order) for _ in range(monomial_count(2))]
        if not any(vec):
            continue
        coeffs = np.array([vec], dtype=np.int16)
        word = combination_values(f, code.matrix, coeffs)[0]
        weight = int((word != 0).sum())
        form = form_from_vector(f, 2, vec)
        x_count = int((form.values_at(surf_pts) == 0).sum())
        assert weight + x_count == code.n


def test_singleton_bound(s2, s3):
    for surface, d in [(s2, 1), (s2, 2), (s3, 1)]:
        code = build_code(surface, d)
        d_min = min_distance_enumerate(code)
        assert code.k + d_min <= code.n + 1


def test_code_report(s2):
    report = code_report(s2, 1)
    assert report == {
        "q": 2,
        "d": 1,
        "n": 45,
        "k": 4,
        "d_min_geometric": 32,
        "d_min_geometric_conditional": False,
        "d_min_enumerated": 32,
    }


def test_code_report_budget_fallback(s3):
    report = code_report(s3, 2, budget=1000)
    assert report["d_min_enumerated"] is None
    assert report["d_min_geometric"] == 210


def test_code_report_conditional_at_d_q_plus_1(s2):
    report = code_report(s2, 3, budget=100)
    assert report["d_min_geometric_conditional"] is True
    assert report["d_min_geometric"] == 45 - 33
