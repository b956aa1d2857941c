import math

import mpmath as mp
import numpy as np
import pytest

from src.core.errors import InvalidArgumentError
from src.core.polyengine import sequence, total
from src.core.zeros import (
    VERDICT_BOUNDED,
    VERDICT_GROWING,
    VERDICT_INCONCLUSIVE,
    AtlasLevel,
    LogScaledPolynomial,
    RecursionEvaluator,
    ZeroAtlas,
    aberth,
    atlas,
    backward_error,
    boundedness_report,
    conjugate_defect,
    newton_polygon_radii,
    refine_simultaneously,
    roots,
    roots_with_residuals,
    snap_real,
)
from src.utils.polynomial import Polynomial, poly_product


def _toy_atlas(moduli):
    return ZeroAtlas([AtlasLevel(n, 1, [complex(-m)], [0.0]) for n, m in enumerate(moduli)])


def test_roots_of_a_cubic():
    found = roots(Polynomial((6, 11, 6, 1)))
    assert [r.real for r in found] == pytest.approx([-3, -2, -1], abs=1e-9)
    assert all(abs(r.imag) < 1e-9 for r in found)


def test_zero_roots_are_split_off():
    found, residuals = roots_with_residuals(Polynomial((0, 0, 1, 0, 1)))
    assert len(found) == 4
    assert found.count(0j) == 2
    others = sorted((r for r in found if r != 0), key=lambda r: r.imag)
    assert others[0] == pytest.approx(-1j, abs=1e-9)
    assert others[1] == pytest.approx(1j, abs=1e-9)
    assert all(res < 1e-8 for res in residuals)


def test_linear_and_constant_polynomials():
    assert roots(Polynomial((2, 4))) == [-0.5]
    assert roots(Polynomial((0, 0, 3))) == [0j, 0j]
    assert roots(Polynomial((5,))) == []
    with pytest.raises(InvalidArgumentError):
        roots(Polynomial.zero())


def test_newton_polygon_radii():
    assert newton_polygon_radii([1, 2, 1]) == [(1, pytest.approx(0.5)), (1, pytest.approx(2.0))]
    assert newton_polygon_radii([1, 0, 1]) == [(2, pytest.approx(1.0))]


def test_log_scaled_evaluation_survives_huge_coefficients():
    # (1 + z)^400 has coefficients far beyond the double range
    coefficients = poly_product([Polynomial((1, 1))] * 400).coefficients
    p, _, mag = LogScaledPolynomial(coefficients).evaluate([1.0])
    assert abs(p[0]) / mag[0] == pytest.approx(1.0)
    ratio, log_scale = LogScaledPolynomial(coefficients).newton_ratio([1.0])
    assert ratio[0] == pytest.approx(2 / 400)
    assert log_scale[0] == pytest.approx(400 * math.log(2))


def test_recursion_evaluator_matches_the_coefficients(chebyshev_tripod):
    data, start = chebyshev_tripod
    vectors = sequence(data, start, 3)
    poly = total(vectors[3])
    slope = poly.derivative()
    evaluator = RecursionEvaluator(data, vectors[0], 3)

    points = np.array([0.3 + 0.2j, -1.5 + 0.7j, 2.0 - 1.0j])
    ratio, _ = evaluator.newton_ratio(points)
    expected = [complex(poly(z)) / complex(slope(z)) for z in points]
    assert list(ratio) == pytest.approx(expected, rel=1e-9)

    with mp.workprec(200):
        z = mp.mpc(-1.5, 0.7)
        value, derivative = evaluator.value_mp(z, derivative=True)
        exact, exact_slope = mp.polyval(list(reversed(poly.coefficients)), z, derivative=True)
        assert abs(value - exact) <= mp.mpf(2) ** -150 * abs(exact)
        assert abs(derivative - exact_slope) <= mp.mpf(2) ** -150 * abs(exact_slope)
        assert abs(evaluator.value_mp(z) - exact) <= mp.mpf(2) ** -150 * abs(exact)


def test_refinement_recovers_perturbed_roots():
    coefficients = (6, 11, 6, 1)
    z = np.array([-1.01, -2.02 + 0.001j, -2.97])
    stuck, accepted = refine_simultaneously(
        LogScaledPolynomial(coefficients), z, [0, 1, 2], 106, sum(c * c for c in coefficients), 1e-8
    )
    assert stuck == []
    assert sorted(accepted) == [0, 1, 2]
    assert all(res < 1e-8 for res in accepted.values())
    assert sorted(z.real) == pytest.approx([-3, -2, -1], abs=1e-8)
    assert np.all(np.abs(z.imag) < 1e-8)


def test_roots_ignore_positive_scaling():
    p = Polynomial((6, 11, 6, 1))
    assert roots(p * 7) == pytest.approx(roots(p), abs=1e-9)


def test_custom_evaluator_needs_a_constant_term():
    with pytest.raises(InvalidArgumentError):
        roots(Polynomial((0, 1, 1)), evaluator=LogScaledPolynomial((1, 1)))


def test_aberth_is_reproducible():
    coefficients = [1, 7, 15, 10, 1]
    first, _ = aberth(coefficients, seed=5)
    second, _ = aberth(coefficients, seed=5)
    assert list(first) == list(second)


def test_backward_error():
    assert backward_error(Polynomial((1, 1)), -1) == 0.0
    assert backward_error(Polynomial((1, 1)), 1) == pytest.approx(math.sqrt(2))
    assert backward_error(Polynomial((1, 2, 1)), 1) == pytest.approx(4 / math.sqrt(6))
    # far from the roots the coefficient norm does not hide the value
    assert backward_error(poly_product([Polynomial((1, 1))] * 50), 13.0) > 1e40
    with pytest.raises(InvalidArgumentError):
        backward_error(Polynomial.zero(), 1)


def test_snap_and_conjugate_defect():
    assert snap_real([1 + 1e-13j, 1 + 1j], 1e-10) == [1 + 0j, 1 + 1j]
    assert conjugate_defect([1j, -1j, 2]) == 0.0
    assert conjugate_defect([1j]) == pytest.approx(2.0)
    assert conjugate_defect([]) == 0.0


def test_chebyshev_atlas_has_real_negative_zeros(chebyshev):
    data, start = chebyshev
    result = atlas(data, start, 3, seed=0)
    assert [level.degree for level in result.levels] == [1, 2, 3, 5]
    assert result.levels[0].roots == [-0.5]
    for level in result.levels:
        assert all(r.imag == 0 and r.real < 0 for r in level.roots)
    assert result.summary()["verdict"] == VERDICT_INCONCLUSIVE
    assert len(result.to_rows()) == 11


def test_tripod_atlas_outer_zeros(chebyshev_tripod):
    data, start = chebyshev_tripod
    result = atlas(data, start, 5, seed=0)
    assert result.max_moduli() == pytest.approx([2.06, 2.28, 2.38, 2.45, 2.53, 2.57], abs=0.01)
    for level in result.levels:
        assert len(level.roots) == level.degree
        assert max(level.residuals) < 1e-8
        assert conjugate_defect(level.roots) < 1e-6


@pytest.mark.parametrize(
    "moduli, verdict",
    [
        ([1, 1.1, 1.2, 1.2, 1.25, 1.3], VERDICT_BOUNDED),
        ([2.0] * 7, VERDICT_BOUNDED),
        ([1, 2, 4, 8, 16, 32], VERDICT_GROWING),
        ([1, 1, 1, 1, 1, 5], VERDICT_INCONCLUSIVE),
        ([1, 2, 4, 8, 16], VERDICT_INCONCLUSIVE),
    ],
)
def test_boundedness_verdicts(moduli, verdict):
    assert boundedness_report(_toy_atlas(moduli)).verdict == verdict


def test_thresholds_are_parameters():
    moduli = [1, 1, 1, 1.3, 1.3, 1.3]
    assert boundedness_report(_toy_atlas(moduli)).verdict == VERDICT_INCONCLUSIVE
    assert boundedness_report(_toy_atlas(moduli), plateau_ratio=1.5).verdict == VERDICT_BOUNDED


@pytest.mark.slow
def test_tripod_zeros_stay_bounded(chebyshev_tripod):
    data, start = chebyshev_tripod
    assert boundedness_report(atlas(data, start, 10, seed=0)).verdict == VERDICT_BOUNDED


@pytest.mark.slow
def test_k2_start_zeros_grow(chebyshev):
    data, start = chebyshev
    result = atlas(data, start, 8, seed=0)
    assert boundedness_report(result).verdict == VERDICT_GROWING
    moduli = result.max_moduli()
    assert moduli[8] >= 10 * moduli[4]
