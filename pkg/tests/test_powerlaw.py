import numpy as np
import pytest
from scipy.special import zeta

from sqltemplate.errors import DegenerateSpectrum
from sqltemplate.powerlaw import ALPHA_GRID, bootstrap_gof, fit_discrete, sample_discrete_powerlaw


def brute_fit(x, min_tail):
    """Scan every xmin and every grid alpha; KS over every integer in the tail."""
    x = np.sort(x)
    best = None
    for xm in np.unique(x)[:-1]:
        tail = x[x >= xm]
        if len(tail) < min_tail:
            continue
        n, s = len(tail), np.log(tail).sum()
        ll = [-n * np.log(zeta(a, xm)) - a * s for a in ALPHA_GRID]
        a = ALPHA_GRID[int(np.argmax(ll))]
        grid = np.arange(xm, tail.max() + 1)
        model = 1 - zeta(a, grid + 1) / zeta(a, xm)
        emp = np.searchsorted(tail, grid, side="right") / n
        d = np.abs(model - emp).max()
        if best is None or d < best[2]:
            best = (a, xm, d)
    return best


@pytest.mark.parametrize("seed", [0, 1])
@pytest.mark.parametrize("kind", ["zipf", "geometric"])
@pytest.mark.parametrize("min_tail", [10, 100])
def test_fit_matches_brute_force(seed, kind, min_tail):
    rng = np.random.default_rng(seed)
    data = rng.zipf(2.2, 600) if kind == "zipf" else rng.geometric(0.2, 600)
    data = np.minimum(data, 5000)  # keep the brute-force grid small
    fit = fit_discrete(data, min_tail=min_tail, min_tail_fraction=0.0)
    alpha, xmin, ks = brute_fit(data, min_tail)
    assert fit.alpha == pytest.approx(alpha, abs=1e-12)
    assert fit.xmin == xmin
    assert fit.ks == pytest.approx(ks, abs=1e-12)


def test_tail_floor_respected():
    data = np.random.default_rng(4).geometric(0.1, 2000)
    fit = fit_discrete(data)
    assert fit.n_tail >= 200


def test_sampler_matches_pmf():
    rng = np.random.default_rng(9)
    alpha, n = 2.5, 200_000
    x = sample_discrete_powerlaw(rng, alpha, n)
    for k in (1, 2, 3, 10):
        expected = k ** -alpha / zeta(alpha, 1)
        se = np.sqrt(expected * (1 - expected) / n)
        assert abs(np.mean(x == k) - expected) < 5 * se


def test_mle_recovers_alpha():
    x = sample_discrete_powerlaw(np.random.default_rng(2), 2.5, 20_000)
    assert fit_discrete(x).alpha == pytest.approx(2.5, abs=0.05)


def test_bootstrap_reproducible():
    x = sample_discrete_powerlaw(np.random.default_rng(1), 2.2, 1000)
    a = bootstrap_gof(x, 100, seed=5)
    b = bootstrap_gof(x, 100, seed=5)
    assert a == b
    assert 0.0 <= a.p_value <= 1.0


def test_bootstrap_needs_resamples():
    with pytest.raises(ValueError):
        bootstrap_gof([1, 2, 3, 4], 0)


@pytest.mark.parametrize("bad", [[], [0, 1, 2], [1.5, 2, 3], [3, 3, 3]])
def test_degenerate_inputs(bad):
    with pytest.raises(DegenerateSpectrum):
        fit_discrete(bad)
