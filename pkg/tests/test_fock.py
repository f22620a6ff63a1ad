import math

import numpy as np
import pytest

from mpqkd.fock import (Ensemble, FockSpaceError, PureState, ZeroNormError,
                        fidelity, inner_product, make_state, normalize)


def test_make_state_identity_construction():
    s = make_state([((1, 0, 0, 1), 1.0)], cutoff=2)
    assert s.amplitude((1, 0, 0, 1)) == 1.0 + 0j
    assert s.amplitude((0, 1, 1, 0)) == 0j
    assert len(s) == 1


def test_make_state_rejects_out_of_cutoff_index():
    with pytest.raises(FockSpaceError, match=r"\(2, 1, 0, 0\)"):
        make_state([((2, 1, 0, 0), 1.0)], cutoff=2)
    with pytest.raises(FockSpaceError):
        make_state([((0, 0, 1, 2), 1.0)], cutoff=2)
    with pytest.raises(FockSpaceError):
        make_state([((-1, 0, 0, 0), 1.0)], cutoff=2)


def test_make_state_empty_is_zero_state():
    z = make_state([], cutoff=3)
    assert len(z) == 0
    assert z.norm_squared() == 0.0
    with pytest.raises(ZeroNormError):
        normalize(z)


def test_make_state_accumulates_duplicates_and_drops_zeros():
    s = make_state([((0, 0, 0, 0), 1.0), ((0, 0, 0, 0), -1.0)], cutoff=1)
    assert len(s) == 0
    s2 = make_state([((0, 0, 0, 0), 0.5), ((0, 0, 0, 0), 0.5)], cutoff=1)
    assert s2.amplitude((0, 0, 0, 0)) == 1.0 + 0j


def test_drop_tolerance():
    entries = [((0, 0, 0, 0), 1.0), ((1, 0, 0, 1), 1e-15)]
    assert len(PureState(entries, cutoff=2)) == 2
    assert len(PureState(entries, cutoff=2, drop_tol=1e-12)) == 1


def test_normalize_examples():
    s = make_state([((1, 0, 0, 1), 2.0), ((0, 1, 1, 0), 0.0)], cutoff=1)
    n = normalize(s)
    assert n.amplitude((1, 0, 0, 1)) == pytest.approx(1.0)
    s2 = make_state([((1, 0, 0, 1), 1.0), ((0, 1, 1, 0), -1.0)], cutoff=1)
    n2 = normalize(s2)
    assert n2.amplitude((1, 0, 0, 1)) == pytest.approx(1 / math.sqrt(2))
    assert n2.amplitude((0, 1, 1, 0)) == pytest.approx(-1 / math.sqrt(2))
    assert n2.norm_squared() == pytest.approx(1.0, abs=1e-12)


def test_inner_product_basics():
    a = make_state([((1, 0, 0, 1), 1.0)], cutoff=2)
    b = make_state([((0, 1, 1, 0), 1.0)], cutoff=2)
    assert inner_product(a, b) == 0j
    assert inner_product(a, a) == 1.0 + 0j


def test_inner_product_conjugate_linear_in_first_argument():
    a = make_state([((1, 0, 0, 1), 1j)], cutoff=1)
    b = make_state([((1, 0, 0, 1), 2.0)], cutoff=1)
    assert inner_product(a, b) == pytest.approx(-2j)
    assert inner_product(b, a) == pytest.approx(2j)


def test_inner_product_cutoff_mismatch():
    a = make_state([((0, 0, 0, 0), 1.0)], cutoff=1)
    b = make_state([((0, 0, 0, 0), 1.0)], cutoff=2)
    with pytest.raises(FockSpaceError):
        inner_product(a, b)


def _random_state(rng, cutoff=4, kets=12):
    entries = []
    for _ in range(kets):
        u = rng.integers(0, cutoff + 1)
        v = rng.integers(0, cutoff + 1 - u)
        w = rng.integers(0, cutoff + 1)
        x = rng.integers(0, cutoff + 1 - w)
        amp = complex(rng.normal(), rng.normal())
        entries.append(((int(u), int(v), int(w), int(x)), amp))
    return make_state(entries, cutoff)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_inner_product_conjugate_symmetry(seed):
    rng = np.random.default_rng(seed)
    a, b = _random_state(rng), _random_state(rng)
    assert inner_product(a, b) == inner_product(b, a).conjugate()


def test_fidelity_is_normalization_independent():
    a = make_state([((1, 0, 0, 1), 3.0)], cutoff=1)
    b = make_state([((1, 0, 0, 1), -0.2j)], cutoff=1)
    assert fidelity(a, b) == pytest.approx(1.0, abs=1e-12)


def test_dump_records_sorted_lexicographically():
    s = make_state([((1, 0, 0, 1), 0.5j), ((0, 1, 1, 0), -0.5)], cutoff=1)
    recs = s.to_records()
    assert recs == [
        {"nah": 0, "nav": 1, "nbh": 1, "nbv": 0, "re": -0.5, "im": 0.0},
        {"nah": 1, "nav": 0, "nbh": 0, "nbv": 1, "re": 0.0, "im": 0.5},
    ]


def test_ensemble_validation():
    s = make_state([((0, 0, 0, 0), 1.0)], cutoff=1)
    with pytest.raises(ValueError):
        Ensemble(((0.6, s), (0.6, s)))
    with pytest.raises(ValueError):
        Ensemble(((-0.1, s), (1.1, s)))
    e = Ensemble(((0.25, s), (0.75, s)))
    assert e.cutoff == 1
    s2 = make_state([((0, 0, 0, 0), 1.0)], cutoff=2)
    with pytest.raises(ValueError):
        Ensemble(((0.5, s), (0.5, s2)))
