import math

import numpy as np
import pytest

from fairhpo.space import (LearnerId, builtin_space, decode, encode,
                           polynomial_mutation, sample, sbx_crossover)


def test_builtin_spaces_match_published_table():
    rf = builtin_space(LearnerId.RANDOM_FOREST)
    assert [p.name for p in rf.params] == [
        "max_depth", "min_samples_split", "min_samples_leaf",
        "max_features", "n_estimators"]
    by_name = {p.name: p for p in rf.params}
    assert (by_name["n_estimators"].lo, by_name["n_estimators"].hi) == (1, 200)
    assert by_name["n_estimators"].scale == "log"
    assert by_name["max_features"].scale == "uniform"

    gbt = builtin_space("gbt")
    eta = gbt.params[0]
    assert eta.name == "eta" and eta.lo == 2 ** -10 and eta.hi == 1.0
    lam = {p.name: p for p in gbt.params}["reg_lambda"]
    assert (lam.lo, lam.hi) == (2 ** -10, 2 ** 10)

    mlp = builtin_space("mlp")
    assert len(mlp.params) == 6
    width = {p.name: p for p in mlp.params}["width"]
    assert (width.lo, width.hi) == (16, 1024)

    with pytest.raises(ValueError):
        builtin_space("svm")


def test_decode_endpoints_and_midpoints():
    space = builtin_space("rf")
    lo_cfg = decode(space, np.zeros(space.dim))
    hi_cfg = decode(space, np.ones(space.dim))
    for p in space.params:
        assert lo_cfg.values[p.name] == pytest.approx(p.lo)
        assert hi_cfg.values[p.name] == pytest.approx(p.hi)
    g = np.zeros(space.dim)
    g[4] = 0.5  # n_estimators, log (1, 200)
    assert decode(space, g).values["n_estimators"] == round(math.sqrt(200))
    assert decode(space, [0, 0, 0, 0.5, 0]).values["max_features"] == pytest.approx(0.5)


def test_decode_validation():
    space = builtin_space("rf")
    with pytest.raises(ValueError, match="length"):
        decode(space, [0.5, 0.5])
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        decode(space, [0.5, 0.5, 0.5, 0.5, 1.5])


def test_encode_decode_roundtrip_ints_exact():
    space = builtin_space("rf")
    by_name = {p.name: p for p in space.params}
    for p in (by_name["max_depth"], by_name["n_estimators"],
              by_name["min_samples_leaf"]):
        for v in range(int(p.lo), int(p.hi) + 1):
            assert p.decode(p.encode(v)) == v


def test_decode_monotonic_per_coordinate():
    space = builtin_space("gbt")
    grid = np.linspace(0, 1, 33)
    for j, p in enumerate(space.params):
        vals = []
        for g in grid:
            geno = np.full(space.dim, 0.5)
            geno[j] = g
            vals.append(decode(space, geno).values[p.name])
        assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_sample_determinism_and_range():
    space = builtin_space("mlp")
    c1 = sample(space, np.random.default_rng(5))
    c2 = sample(space, np.random.default_rng(5))
    assert np.array_equal(c1.genotype, c2.genotype)
    rng = np.random.default_rng(0)
    for _ in range(200):
        c = sample(space, rng)
        for p in space.params:
            assert p.lo <= c.values[p.name] <= p.hi


def test_sample_log_int_median_near_geometric_mean():
    space = builtin_space("rf")
    rng = np.random.default_rng(2)
    vals = [sample(space, rng).values["n_estimators"] for _ in range(10_000)]
    geo = math.sqrt(1 * 200)
    med = np.median(vals)
    assert 0.8 * geo <= med <= 1.2 * geo


def test_sbx_identity_cases():
    rng = np.random.default_rng(1)
    a = rng.random(6)
    b = rng.random(6)
    c1, c2 = sbx_crossover(a, b, eta_c=15, p_cx=0.0, rng=rng)
    assert np.array_equal(c1, a) and np.array_equal(c2, b)
    c1, c2 = sbx_crossover(a, a.copy(), eta_c=15, p_cx=1.0, rng=rng)
    assert np.array_equal(c1, a) and np.array_equal(c2, a)
    with pytest.raises(ValueError):
        sbx_crossover(a, b[:3], 15, 0.5, rng)


def test_sbx_mean_preservation():
    rng = np.random.default_rng(3)
    k = 8
    sums = np.zeros(k)
    parent_sums = np.zeros(k)
    for _ in range(10_000):
        a = rng.random(k)
        b = rng.random(k)
        c1, c2 = sbx_crossover(a, b, eta_c=15, p_cx=0.9, rng=rng)
        sums += c1 + c2
        parent_sums += a + b
    assert np.all(np.abs(sums - parent_sums) / 20_000 < 0.01)


def test_polynomial_mutation_contracts():
    rng = np.random.default_rng(4)
    g = rng.random(10)
    assert np.array_equal(polynomial_mutation(g, 20, 0.0, rng), g)
    out = np.concatenate([polynomial_mutation(rng.random(10), 20, 1.0, rng)
                          for _ in range(1000)])
    assert np.all((out >= 0.0) & (out <= 1.0))


def test_polynomial_mutation_displacement_bounded():
    rng = np.random.default_rng(8)
    disp = []
    for _ in range(5000):
        g = rng.random(4)
        out = polynomial_mutation(g, eta_m=20, p_m=1.0, rng=rng)
        disp.append(np.abs(out - g).mean())
    mean_disp = float(np.mean(disp))
    assert 0.0 < mean_disp < 0.5
