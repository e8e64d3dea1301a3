import numpy as np
import pytest

from kcmtest.dgp import DgpSpec, Dataset, coefficients, draw_covariates, generate, parse_dgp, response, split
from kcmtest.exceptions import DataError
from kcmtest.rng import derive_seed, make_rng


def test_null_at_origin():
    assert response(1, np.zeros((1, 10)), np.zeros(1))[0] == 1.0
    assert response(4, np.zeros((1, 10)), np.zeros(1))[0] == 1.0


def test_dgp3_formula(rng):
    X = rng.standard_normal((100, 10))
    e = rng.standard_normal(100)
    y = response(3, X, e)
    xb = X @ np.full(10, 0.5)
    for i in range(100):
        assert y[i] - 1.0 - xb[i] - e[i] == pytest.approx(2.0 * np.cos(1.2 * np.sqrt(X[i] @ X[i])), abs=1e-12)


def test_alternative_terms(rng):
    X = rng.standard_normal((20, 10))
    e = np.zeros(20)
    xb = X @ np.full(10, 0.5)
    base = 1 + xb
    np.testing.assert_allclose(response(2, X, e) - base, 1.5 * np.exp(-xb**2))
    np.testing.assert_allclose(response(4, X, e) - base, 0.5 * xb**2)
    np.testing.assert_allclose(response(5, X, e) - base, 1.5 * np.exp(0.25 * xb))


def test_heteroskedastic_designs(rng):
    X = draw_covariates(6, 50, 10, rng)
    e = rng.standard_normal(50)
    norm = np.sqrt((X**2).sum(axis=1))
    np.testing.assert_allclose(response(6, X, e), 1 + X.sum(axis=1) + norm + np.abs(X.sum(axis=1)) * e)
    scale = np.sqrt(0.1 + X[:, :5].sum(axis=1) + (X[:, 5:] ** 2).sum(axis=1))
    np.testing.assert_allclose(response(7, X, e, n_total=400), 1 + X.sum(axis=1) + norm / 20 + scale * e)


@pytest.mark.parametrize("dgp, q", [(6, 10), (6, 20), (7, 10), (7, 20)])
def test_covariate_blocks(dgp, q):
    X = draw_covariates(dgp, 20_000, q, np.random.default_rng(0))
    h = q // 2
    for l in range(1, h + 1):
        upper = 1 + 0.1 * (l - 1) if dgp == 6 else l
        col = X[:, l - 1]
        assert col.min() >= 0 and col.max() <= upper
        assert col.max() > 0.98 * upper
    for l in range(h + 1, q + 1):
        assert X[:, l - 1].std() == pytest.approx(1 + 0.1 * (l - h), rel=0.03)


def test_coefficients():
    np.testing.assert_array_equal(coefficients(1, 3), [1, 0.5, 0.5, 0.5])
    np.testing.assert_array_equal(coefficients(7, 2), [1, 1, 1])


def test_spec_validation():
    with pytest.raises(DataError):
        DgpSpec(8)
    with pytest.raises(DataError):
        DgpSpec(6, q=15)
    with pytest.raises(DataError):
        DgpSpec(1, q=10, n=11)
    assert DgpSpec(6, 20).name == "dgp6*" and DgpSpec(2, 20).name == "dgp2"


def test_parse_dgp():
    assert parse_dgp("dgp4") == 4 and parse_dgp("DGP6*") == 6 and parse_dgp("7") == 7
    for bad in ("dgp0", "dgp9", "foo"):
        with pytest.raises(DataError):
            parse_dgp(bad)


def test_reproducible():
    a, b = generate(DgpSpec(6, 10, 50), 3), generate(DgpSpec(6, 10, 50), 3)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
    assert not np.array_equal(a.y, generate(DgpSpec(6, 10, 50), 4).y)


def test_null_mean():
    for seed in range(10):
        d = generate(DgpSpec(1, 10, 400), seed)
        e = d.y - 1 - d.X @ np.full(10, 0.5)
        assert abs(e.mean()) < 4 / np.sqrt(400)


def test_local_drift_shrinks():
    r = np.random.default_rng(2)
    rms = {}
    for n in (100, 400, 1600):
        X = draw_covariates(7, n, 10, r)
        drift = response(7, X, np.zeros(n)) - 1 - X.sum(axis=1)
        rms[n] = np.sqrt(np.mean(drift**2))
    for a, b in ((100, 400), (400, 1600)):
        assert 1 / 1.5 < (rms[a] / rms[b]) / 2 < 1.5


@pytest.mark.parametrize("N, sizes", [(200, (30, 170)), (400, (60, 340))])
def test_split_sizes(N, sizes):
    train, test = split(generate(DgpSpec(1, 10, N), 0), 0.15, seed=1)
    assert (train.n, test.n) == sizes


def test_split_partition():
    d = generate(DgpSpec(2, 5, 60), 1)
    for seed in range(20):
        train, test = split(d, 0.15, seed)
        idx = np.concatenate([train.index, test.index])
        assert sorted(idx.tolist()) == list(range(60))
        np.testing.assert_array_equal(train.X, d.X[train.index])
        np.testing.assert_array_equal(test.y, d.y[test.index])
    a, _ = split(d, 0.15, 5)
    b, _ = split(d, 0.15, 5)
    np.testing.assert_array_equal(a.index, b.index)


def test_split_degenerate():
    d = generate(DgpSpec(1, 1, 10), 0)
    for frac in (0.0, 1.0, 0.05, 0.95):
        with pytest.raises(DataError):
            split(d, frac, 0)


def test_dataset_checks():
    with pytest.raises(DataError):
        Dataset(np.zeros((3, 2)), np.zeros(4))
    with pytest.raises(DataError):
        Dataset(np.array([[np.nan, 1.0], [0.0, 1.0]]), np.zeros(2))


def test_seed_derivation():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert derive_seed(1, 2) != derive_seed(2, 1)
    assert derive_seed(5, "boot", 3) != derive_seed(5, "boot", 4)
    assert 0 <= derive_seed(0, "data") < 2**63
    assert make_rng(3, "x").random() == make_rng(3, "x").random()
    with pytest.raises(ValueError):
        derive_seed(-1)
