import math

import pytest

from mpqkd.fock import fidelity, inner_product, normalize
from mpqkd.source import (PdcParams, SqueezeParams, pdc_state,
                          sector_probability, singlet_state,
                          squeezed_pair_state, truncation_deficit)


def test_singlet_n1():
    s = singlet_state(1, cutoff=2)
    r = 1 / math.sqrt(2)
    assert s.amplitude((1, 0, 0, 1)) == pytest.approx(r)
    assert s.amplitude((0, 1, 1, 0)) == pytest.approx(-r)
    assert len(s) == 2


def test_singlet_n0_is_vacuum():
    s = singlet_state(0, cutoff=1)
    assert s.amplitude((0, 0, 0, 0)) == 1.0 + 0j
    assert len(s) == 1


def test_singlet_n2_hand_expansion():
    # expanding the defining sum for n=2 by hand gives
    # (|2,0;0,2> - |1,1;1,1> + |0,2;2,0>)/sqrt(3)
    s = singlet_state(2, cutoff=3)
    r = 1 / math.sqrt(3)
    assert s.amplitude((2, 0, 0, 2)) == pytest.approx(r)
    assert s.amplitude((1, 1, 1, 1)) == pytest.approx(-r)
    assert s.amplitude((0, 2, 2, 0)) == pytest.approx(r)
    assert s.norm_squared() == pytest.approx(1.0, abs=1e-12)


def test_singlet_requires_n_within_cutoff():
    with pytest.raises(ValueError):
        singlet_state(3, cutoff=2)


def test_singlet_sector_orthogonality():
    states = [singlet_state(n, cutoff=5) for n in range(5)]
    for i, a in enumerate(states):
        for j, b in enumerate(states):
            if i == j:
                assert inner_product(a, b).real == pytest.approx(1.0, abs=1e-14)
            else:
                # disjoint photon-number sectors: exactly zero
                assert inner_product(a, b) == 0j


def test_pdc_tau_zero_is_vacuum():
    s = pdc_state(PdcParams(tau=0.0, cutoff=5))
    assert s.amplitude((0, 0, 0, 0)) == 1.0 + 0j
    assert len(s) == 1


def test_pdc_single_pair_amplitude():
    # amplitude on |1,0;0,1> is tanh(tau)/cosh(tau)^2: the sector weight
    # sqrt(2) tanh/cosh^2 times the 1/sqrt(2) singlet coefficient.  Cross
    # checked against the normalized squeezed-pair route below.
    s = pdc_state(PdcParams(tau=0.5, cutoff=30))
    expect = math.tanh(0.5) / math.cosh(0.5) ** 2
    assert expect == pytest.approx(0.3634309906917937, abs=1e-15)
    assert s.amplitude((1, 0, 0, 1)).real == pytest.approx(expect, abs=1e-14)
    sq = normalize(squeezed_pair_state(SqueezeParams(lam=math.tanh(0.5),
                                                     cutoff=30)))
    assert sq.amplitude((1, 0, 0, 1)).real == pytest.approx(expect, abs=1e-12)


@pytest.mark.parametrize("tau", [0.1, 0.5, 0.9])
def test_pdc_norm_close_to_one_at_cutoff_40(tau):
    # the identity sum_n (n+1) tanh^2n = cosh^4 makes the untruncated norm
    # exactly 1; at cutoff 40 the tail is below 1e-10 up to tau ~ 0.9
    s = pdc_state(PdcParams(tau=tau, cutoff=40))
    assert s.norm_squared() == pytest.approx(1.0, abs=1e-10)


def test_pdc_norm_at_tau_one():
    s = pdc_state(PdcParams(tau=1.0, cutoff=40))
    assert s.norm_squared() == pytest.approx(1.0, abs=1e-8)


def test_pdc_truncation_deficit_matches_norm():
    params = PdcParams(tau=1.1, cutoff=12)
    s = pdc_state(params)
    assert 1.0 - s.norm_squared() == pytest.approx(truncation_deficit(params),
                                                   abs=1e-12)
    assert truncation_deficit(params) > 1e-6  # low cutoff leaves a real tail


@pytest.mark.parametrize("tau", [0.3, 0.7])
def test_pdc_sector_probabilities(tau):
    s = pdc_state(PdcParams(tau=tau, cutoff=25))
    for n in range(6):
        mass = math.fsum(abs(a) ** 2 for (u, v, w, x), a in s.items()
                         if u + v == n)
        assert mass == pytest.approx(sector_probability(n, tau), abs=1e-12)


def test_pdc_correlation_law():
    # every ket satisfies (Nv - Nh)_alice == (Nh - Nv)_bob
    s = pdc_state(PdcParams(tau=0.8, cutoff=15))
    for (u, v, w, x), _ in s.items():
        assert v - u == w - x


def test_squeezed_pair_examples():
    s0 = squeezed_pair_state(SqueezeParams(lam=0.0, cutoff=4))
    assert len(s0) == 1 and s0.amplitude((0, 0, 0, 0)) == 1.0 + 0j

    s = squeezed_pair_state(SqueezeParams(lam=0.3, cutoff=6))
    # n=2, m=1 ket carries lam^2 * (-1)
    assert s.amplitude((1, 1, 1, 1)).real == pytest.approx(-0.09, abs=1e-15)
    assert s.amplitude((2, 0, 0, 2)).real == pytest.approx(0.09, abs=1e-15)


def test_squeeze_params_require_lam_below_one():
    with pytest.raises(ValueError):
        SqueezeParams(lam=1.0, cutoff=4)
    with pytest.raises(ValueError):
        PdcParams(tau=-0.1, cutoff=4)


@pytest.mark.parametrize("tau", [0.1, 0.5, 0.9])
def test_squeezed_pair_equals_pdc_after_normalization(tau):
    pdc = pdc_state(PdcParams(tau=tau, cutoff=40))
    sq = squeezed_pair_state(SqueezeParams(lam=math.tanh(tau), cutoff=40))
    assert fidelity(sq, pdc) == pytest.approx(1.0, abs=1e-10)
