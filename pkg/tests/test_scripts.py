import pytest

from fopz.scripts.benchmark import run_benchmark, summarize
from fopz.scripts.generate import (
    PROBLEMS,
    generate_problem,
    gridded_cubes,
    random_dim3_formula,
    random_formula,
    rng_for,
    stacked_cubes,
)
from fopz.services.dataset import Dataset, bind
from fopz.services.formula import Quantifier, parse, to_dnf
from fopz.utils.errors import FopzError

E, A = Quantifier.EXISTS, Quantifier.FORALL


@pytest.mark.parametrize("problem", PROBLEMS)
def test_generate_is_deterministic(problem):
    assert generate_problem(problem, 5, 42) == generate_problem(problem, 5, 42)


@pytest.mark.parametrize("problem", ["formula", "dim3", "3sum"])
def test_generated_formulas_bind(problem):
    generated = generate_problem(problem, 4, 7)
    payload = generated.payload
    data = Dataset.create(payload["sets"], payload["free"], payload["universe"])
    inst = bind(parse(generated.formula), data)
    assert inst.k == 3
    assert all(len(s) == 4 for s in inst.sets)


def test_generate_unknown_problem():
    with pytest.raises(FopzError):
        generate_problem("knapsack", 4, 0)


def test_random_formula_shape():
    f = parse(random_formula(rng_for(1), "AEA", d=2))
    assert f.quantifiers == (A, E, A)
    assert all(q.dimension == 2 for q in f.prefix)


def test_random_dim3_formula_uses_few_inequalities():
    rng = rng_for(5)
    for _ in range(10):
        normal = to_dnf(parse(random_dim3_formula(rng, "EAE")))
        assert normal.dimension <= 3


def test_cube_layouts():
    assert stacked_cubes(3, side=4) == [(0, 0, 0), (1, 1, 3), (2, 2, 6)]
    corners = gridded_cubes(6, side=4)
    assert len(corners) == 6
    assert len(set(corners)) == 6
    assert all(c % 3 == 0 for corner in corners for c in corner)


def test_run_benchmark_rows():
    df = run_benchmark("baseline", [4, 6], seed=3, repeats=2)
    assert list(df.columns) == ["n", "engine", "workload", "repeat", "ms", "result"]
    assert len(df) == 4
    assert set(df["workload"]) == {"3sum"}
    assert df["result"].isin([True, False]).all()


def test_benchmark_engines_agree():
    brute = run_benchmark("brute", [5], seed=9, workload="sumset")
    dim3 = run_benchmark("ineqdim3", [5], seed=9)
    assert list(dim3["workload"]) == ["sumset"]
    assert list(brute["result"]) == list(dim3["result"])


def test_summarize_growth():
    df = run_benchmark("brute", [3, 4], seed=0, repeats=2)
    summary = summarize(df)
    assert list(summary["n"]) == [3, 4]
    assert list(summary["runs"]) == [2, 2]
    assert summary["growth"].isna().iloc[0]
