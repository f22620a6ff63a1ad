import math

import numpy as np
import pytest

from oracles import oracle_mutual_information
from mpqkd.infotheory import (JointDistribution, entropy, mutual_information,
                              secrecy_capacity_bound)


def test_entropy_examples():
    assert entropy([0.5, 0.5]) == pytest.approx(1.0)
    assert entropy([1.0]) == 0.0
    assert entropy([1 / 3] * 3) == pytest.approx(math.log2(3))
    assert entropy([0.0, 1.0]) == 0.0


def test_entropy_rejects_bad_input():
    with pytest.raises(ValueError):
        entropy([0.5, -0.5, 1.0])
    with pytest.raises(ValueError):
        entropy([0.5, 0.4])


def test_mutual_information_perfectly_correlated():
    j = JointDistribution({(0, 0): 0.5, (1, 1): 0.5})
    assert mutual_information(j) == pytest.approx(1.0)
    j3 = JointDistribution({(i, i): 1 / 3 for i in range(3)})
    assert mutual_information(j3) == pytest.approx(math.log2(3))


def test_mutual_information_product_distribution():
    j = JointDistribution({(a, b): 0.25 for a in range(2) for b in range(2)})
    assert mutual_information(j) == pytest.approx(0.0, abs=1e-12)


def test_mutual_information_symmetry_and_relabeling():
    rng = np.random.default_rng(5)
    p = rng.random((3, 4))
    p /= p.sum()
    j = JointDistribution({(a, b): p[a, b] for a in range(3) for b in range(4)})
    swapped = JointDistribution({(b, a): p[a, b]
                                 for a in range(3) for b in range(4)})
    relabeled = JointDistribution({((a * 7 + 1) % 11, "xyzw"[b]): p[a, b]
                                   for a in range(3) for b in range(4)})
    i0 = mutual_information(j)
    assert mutual_information(swapped) == pytest.approx(i0, abs=1e-12)
    assert mutual_information(relabeled) == pytest.approx(i0, abs=1e-12)
    assert i0 == pytest.approx(oracle_mutual_information(j.table), abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_merging_labels_never_increases_information(seed):
    rng = np.random.default_rng(seed)
    p = rng.random((4, 5))
    p /= p.sum()
    j = JointDistribution({(a, b): p[a, b] for a in range(4) for b in range(5)})
    tab = {}
    for (a, b), v in j.table.items():
        k = (a, min(b, 3))  # merge the two rightmost B labels
        tab[k] = tab.get(k, 0.0) + v
    merged = JointDistribution(tab)
    assert mutual_information(merged) <= mutual_information(j) + 1e-12


def test_mutual_information_bounded_by_marginal_entropies():
    rng = np.random.default_rng(11)
    p = rng.random((3, 3))
    p /= p.sum()
    j = JointDistribution({(a, b): p[a, b] for a in range(3) for b in range(3)})
    i = mutual_information(j)
    assert 0.0 <= i <= min(entropy(j.marginal(0).values()),
                           entropy(j.marginal(1).values())) + 1e-12


def test_joint_distribution_validation():
    with pytest.raises(ValueError):
        JointDistribution({})
    with pytest.raises(ValueError):
        JointDistribution({(0, 0): 0.5, (0, 1, 2): 0.5})
    with pytest.raises(ValueError):
        JointDistribution({(0, 0): 1.5})
    with pytest.raises(ValueError):
        JointDistribution({(0, 0): -0.1, (0, 1): 1.1})


def test_tripartite_marginals():
    j = JointDistribution({(0, 0, "e"): 0.5, (1, 1, "f"): 0.5})
    ab = j.pair_marginal(0, 1)
    assert mutual_information(ab) == pytest.approx(1.0)
    assert j.marginal(2) == {"e": 0.5, "f": 0.5}


def test_condition_renormalizes():
    j = JointDistribution({(0, 0): 0.25, (1, 1): 0.75})
    c = j.condition(lambda k: k[0] == 1)
    assert c.table[(1, 1)] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        j.condition(lambda k: False)


def test_secrecy_capacity_bound():
    assert secrecy_capacity_bound(1.0, 0.0, 0.0, 1.0) == 1.0
    assert secrecy_capacity_bound(0.3, 0.5, 0.9, 1.0) == 0.0
    assert secrecy_capacity_bound(math.log2(3), 0.0, 0.0, 0.5) == \
        pytest.approx(0.5 * math.log2(3))
    with pytest.raises(ValueError):
        secrecy_capacity_bound(-0.1, 0.0, 0.0, 0.5)
