import math

import numpy as np
import pytest

from aps_sim.metrics import (
    Histogram,
    format_bits,
    kld,
    kld_vs_uniform,
    read_histogram_csv,
    write_histogram_csv,
)


def test_kld_identical_is_zero():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    assert kld(p, p) == 0.0


def test_kld_one_hot_vs_uniform():
    assert kld([1, 0, 0, 0], [0.25] * 4) == pytest.approx(math.log(4), abs=1e-12)


def test_kld_two_term():
    # 2 * 0.5 * ln(0.5 / 0.25)
    assert kld([0.5, 0.5, 0, 0], [0.25] * 4) == pytest.approx(math.log(2), abs=1e-12)


def test_kld_rejects_missing_support():
    with pytest.raises(ValueError):
        kld([0.5, 0.5], [1.0, 0.0])
    with pytest.raises(ValueError):
        kld([1.0], [0.5, 0.5])


def test_kld_vs_uniform_values():
    assert kld_vs_uniform(np.full(8, 1 / 8)) == 0.0
    for n in range(1, 8):
        p = np.zeros(2**n)
        p[-1] = 1
        assert kld_vs_uniform(p) == pytest.approx(n * math.log(2), abs=1e-12)


def test_kld_degeneracy_spread():
    n = 5
    values = []
    for k in range(1, 2**n + 1):
        p = np.zeros(2**n)
        p[:k] = 1 / k
        values.append(kld_vs_uniform(p))
        assert values[-1] == pytest.approx(math.log(2**n / k), abs=1e-12)
    assert all(a > b for a, b in zip(values, values[1:]))


def test_histogram_ranked_and_top():
    h = Histogram(2, [1, 5, 3, 1], 10)
    assert h.ranked()[0] == ("01", 0.5)
    assert [b for b, _ in h.ranked()] == ["01", "10", "00", "11"]
    assert h.top() == (1, 0.5)
    assert h.entries()["10"] == pytest.approx(0.3)


def test_histogram_validation():
    with pytest.raises(ValueError):
        Histogram(2, [1, 2, 3], 6)
    with pytest.raises(ValueError):
        Histogram(1, [-1, 2], 1)


def test_format_bits():
    assert format_bits(6, 4) == "0110"


def test_histogram_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    p = rng.random(16)
    p /= p.sum()
    h = Histogram.exact(p)
    path = tmp_path / "h.csv"
    write_histogram_csv(h, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "bitstring,probability"
    probs = [float(line.split(",")[1]) for line in lines[1:]]
    assert probs == sorted(probs, reverse=True)
    back = read_histogram_csv(path)
    np.testing.assert_array_equal(back.probabilities, h.probabilities)
