import pytest

from fopz.services import problems
from fopz.utils.errors import ConsistencyError, DatasetError, DimensionError


def vectors(rng, n, d, bound=5):
    return [tuple(v) for v in rng.integers(-bound, bound + 1, size=(n, d)).tolist()]


def values(rng, n, bound=6):
    return rng.integers(-bound, bound + 1, size=n).tolist()


# ===============================
# PARETO
# ===============================

def test_pareto_verify_examples():
    assert problems.pareto_verify([(0, 0)], [(1, 1)], [(1, 1)])
    assert not problems.pareto_verify([(0, 0)], [(1, 1)], [(0, 0)])


def test_pareto_verify_cross_check():
    assert problems.pareto_verify([(0, 0), (1, -1)], [(1, 1)], [(2, 1)], cross_check=True)


def test_pareto_extended_examples():
    verdict = problems.pareto_verify_extended([(0, 0)], [(1, 1)], [(1, 1)])
    assert (verdict.inclusion, verdict.dominance, verdict.minimality) == (True, True, True)
    assert verdict.is_pareto_sum
    assert not problems.pareto_verify_extended([(0, 0)], [(1, 1)], [(1, 1), (0, 0)]).minimality
    outside = problems.pareto_verify_extended([(0, 0)], [(1, 1)], [(2, 2)])
    assert not outside.inclusion
    assert outside.dominance


def test_pareto_compute_examples():
    assert problems.pareto_compute([(0, 0), (1, 0)], [(0, 1)]) == [(1, 1)]
    assert problems.pareto_compute([(0, 0)], [(0, 0)]) == [(0, 0)]


def test_sumset_beyond_int64():
    assert problems.sumset([(2 ** 62,)], [(2 ** 62,)]) == {(2 ** 63,)}
    assert problems.sumset([(2 ** 63, 0)], [(1, -1), (0, 0)]) == {(2 ** 63 + 1, -1), (2 ** 63, 0)}
    assert problems.sumset([(-2 ** 62,)], [(-2 ** 62,)]) == {(-2 ** 63,)}
    assert problems.sumset([(2 ** 62 - 1,)], [(2 ** 62 - 1,)]) == {(2 ** 63 - 2,)}


@pytest.mark.parametrize("A, B, C", [
    ([(2 ** 62, 0)], [(2 ** 62, 0)], [(0, 0)]),
    ([(2 ** 62, 0)], [(2 ** 62, 0)], [(2 ** 63, 0)]),
    ([(2 ** 63, 1)], [(-1, 2 ** 62)], [(2 ** 63 - 1, 2 ** 62 + 1), (0, 0)]),
    ([(-2 ** 63, 0)], [(-2 ** 62, 0)], [(-3 * 2 ** 62, -1)]),
])
def test_pareto_large_coordinates(A, B, C):
    expected = problems.pareto_verify_naive(A, B, C)
    assert problems.pareto_verify(A, B, C) == expected
    assert problems.pareto_verify_via_compute(A, B, C) == expected
    assert problems.pareto_verify_extended(A, B, C).dominance == expected


def test_pareto_large_coordinates_results():
    assert not problems.pareto_verify([(2 ** 62, 0)], [(2 ** 62, 0)], [(0, 0)])
    assert problems.pareto_compute([(2 ** 63, 0), (0, 0)], [(1, 1)]) == [(2 ** 63 + 1, 1)]


def test_sumset_approx_large_values():
    assert not problems.sumset_approx([2 ** 62], [2 ** 62], [-2 ** 63], 0)
    assert problems.sumset_approx([2 ** 62], [2 ** 62], [2 ** 63], 0)
    assert problems.sumset_approx([2 ** 63], [1], [2 ** 63 - 5], 6)
    assert problems.sumset_inclusion([2 ** 62], [2 ** 62], [2 ** 63])


def test_pareto_cross_check_mismatch(monkeypatch):
    class Flipped:
        def decide(self, engine="auto"):
            return False

    monkeypatch.setattr(problems, "pareto_encoding", lambda A, B, C: Flipped())
    with pytest.raises(ConsistencyError):
        problems.pareto_verify([(0, 0)], [(1, 1)], [(1, 1)], cross_check=True)


def test_pareto_mixed_dimensions():
    with pytest.raises(DimensionError):
        problems.pareto_verify([(0, 0)], [(1,)], [(1, 1)])


@pytest.mark.parametrize("d", [2, 3])
def test_pareto_random(rng, d):
    for _ in range(60):
        A, B = vectors(rng, int(rng.integers(1, 8)), d), vectors(rng, int(rng.integers(1, 8)), d)
        C = vectors(rng, int(rng.integers(0, 8)), d, bound=10)
        assert problems.pareto_verify(A, B, C) == problems.pareto_verify_naive(A, B, C)
        front = problems.pareto_compute(A, B)
        assert problems.pareto_verify_extended(A, B, front).is_pareto_sum
        assert problems.pareto_front(front) == front
        assert problems.pareto_verify_via_compute(A, B, C) == problems.pareto_verify(A, B, C)


def test_pareto_formula_agrees(rng):
    for _ in range(10):
        A, B, C = vectors(rng, 3, 2), vectors(rng, 3, 2), vectors(rng, 4, 2, bound=10)
        assert problems.pareto_encoding(A, B, C).decide() == problems.pareto_verify_naive(A, B, C)


# ===============================
# HAUSDORFF
# ===============================

def test_hausdorff_examples():
    assert problems.hausdorff_n_translations([(0, 0)], [(1, 1)], [(1, 1)], 0)
    assert not problems.hausdorff_n_translations([(0, 0)], [(1, 1)], [(3, 3)], 1)


def test_hausdorff_vacuity():
    assert problems.hausdorff_n_translations([(0, 0)], [], [], 0)
    assert not problems.hausdorff_n_translations([(0, 0)], [(1, 1)], [], 5)


def test_hausdorff_negative_gamma():
    with pytest.raises(DatasetError):
        problems.hausdorff_encoding([(0,)], [(0,)], [(0,)], -1)


@pytest.mark.parametrize("d", [1, 2])
def test_hausdorff_random(rng, d):
    for _ in range(15):
        A, B, C = (vectors(rng, int(rng.integers(1, 5)), d) for _ in range(3))
        gamma = int(rng.integers(0, 4))
        assert problems.hausdorff_n_translations(A, B, C, gamma) == problems.hausdorff_naive(A, B, C, gamma)


# ===============================
# SUMSET APPROXIMATION
# ===============================

def test_sumset_approx_examples():
    assert problems.sumset_approx([0], [0], [0], 0)
    assert not problems.sumset_approx([0], [5], [0], 4)


def test_sumset_approx_negative_t():
    with pytest.raises(DatasetError):
        problems.sumset_approx([0], [0], [0], -1)


def test_additive_approximation():
    assert problems.is_additive_approximation([0, 1], [0, 2], [0, 2], 1)
    assert not problems.is_additive_approximation([0, 1], [0, 2], [0, 5], 1)


def test_sumset_approx_random(rng):
    for _ in range(150):
        A, B, C = values(rng, int(rng.integers(0, 8))), values(rng, int(rng.integers(0, 8))), values(rng, 6, 12)
        t = int(rng.integers(0, 4))
        assert problems.sumset_approx(A, B, C, t) == problems.sumset_approx_naive(A, B, C, t)


def test_sumset_approx_formula_route(rng):
    for _ in range(15):
        A, B, C = values(rng, 3), values(rng, 3), values(rng, 4, 12)
        t = int(rng.integers(0, 4))
        assert problems.sumset_approx_encoding(A, B, C, t).decide() == problems.sumset_approx_naive(A, B, C, t)


def test_universal_3sum():
    assert problems.universal_3sum_encoding([1, 2], [0, 1], [1, 3]).decide()
    assert not problems.universal_3sum_encoding([1, 2], [0, 1], [1, 7]).decide()


# ===============================
# MAXCONV
# ===============================

def test_maxconv_examples():
    assert problems.maxconv_lb([0, 0], [0, 0], [0, 0])
    assert not problems.maxconv_lb([0, 0], [0, 0], [1, 0])
    assert problems.maxconv_report([0, 0], [0, 0], [0, 0]).consistent


def test_maxconv_length_mismatch():
    with pytest.raises(DatasetError):
        problems.maxconv_lb([0], [0, 1], [0])


def test_maxconv_encodings_agree(rng):
    for _ in range(25):
        n = int(rng.integers(1, 5))
        A, B, C = values(rng, n, 4), values(rng, n, 4), values(rng, n, 8)
        report = problems.maxconv_report(A, B, C)
        assert report.consistent
        assert report.direct == problems.maxconv_lb(A, B, C)


# ===============================
# CLASSIC ENCODINGS
# ===============================

def test_three_average():
    encoder, direct = problems.classic_encoders()["3avg"]
    assert not direct([1, 2, 3])
    assert not encoder([1, 2, 3]).decide()
    assert encoder([1, 2, 4]).decide()


def test_conv3sum():
    assert problems.solve_classic("conv3sum", [1, 5], [2, 7], [3, 0, 0])
    assert not problems.conv3sum_direct([1], [2], [4])


def test_triangle():
    cycle = [(0, 1), (1, 2), (2, 0), (2, 3)]
    assert problems.triangle_direct(cycle)
    assert problems.solve_classic("triangle", cycle)
    assert not problems.solve_classic("triangle", [(0, 1), (1, 0), (1, 2)])
    with pytest.raises(DatasetError):
        problems.triangle_encoding([(1, 1)])


def test_ksum_encoding_requires_two_lists():
    with pytest.raises(DatasetError):
        problems.ksum_encoding([[1]], 1)


@pytest.mark.parametrize("name", ["3sum", "ksum", "3avg", "conv3sum", "triangle"])
def test_classic_random(rng, name):
    encoder, direct = problems.classic_encoders()[name]
    for _ in range(10):
        if name == "3sum":
            args = (values(rng, 4), values(rng, 4), values(rng, 4))
        elif name == "ksum":
            args = ([values(rng, 3) for _ in range(4)], int(rng.integers(-6, 7)))
        elif name == "3avg":
            args = (values(rng, 5, 10),)
        elif name == "conv3sum":
            args = (values(rng, 3, 3), values(rng, 3, 3), values(rng, 5, 5))
        else:
            edges = {tuple(e) for e in rng.integers(0, 5, size=(6, 2)).tolist() if e[0] != e[1]}
            args = (sorted(edges),)
        assert encoder(*args).decide() == direct(*args)
