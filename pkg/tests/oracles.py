"""Independent brute-force oracles used only by the tests.

Everything here is deliberately written against the physics rather than
against the package internals: rotations distribute photons one at a time
instead of using binomial tables, and loss is expanded at the amplitude
level into explicit (kept, lost) mode pairs before the Born rule, so any
cross term between source kets that the fast path drops would show up as a
disagreement.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict

from mpqkd.fock import Ensemble, PureState
from mpqkd.polarization import Basis, Side

CROSS_ANGLE = math.pi / 4


def oracle_rotate_pair(p: int, q: int, theta: float) -> dict:
    """Amplitudes of the rotated |p, q> by per-photon enumeration.

    Each of the p+q photons is routed independently (h -> cos h + sin v,
    v -> -sin h + cos v); bosonic normalization is restored at the end.
    """
    c, s = math.cos(theta), math.sin(theta)
    single = [(c, s)] * p + [(-s, c)] * q   # per-photon (to_h, to_v) amps
    acc: dict[int, float] = defaultdict(float)
    for choice in itertools.product((0, 1), repeat=p + q):
        amp = 1.0
        for photon, to_v in enumerate(choice):
            amp *= single[photon][to_v]
        r = (p + q) - sum(choice)
        acc[r] += amp
    fpq = math.factorial(p) * math.factorial(q)
    out = {}
    for r, amp in acc.items():
        if amp != 0.0:
            norm = math.sqrt(math.factorial(r) * math.factorial(p + q - r)
                             / fpq)
            out[r] = amp * norm
    return out


def oracle_rotate(state: PureState, theta: float, side: Side) -> PureState:
    if side is Side.BOTH:
        return oracle_rotate(oracle_rotate(state, theta, Side.ALICE),
                             theta, Side.BOB)
    acc: dict = defaultdict(complex)
    for (u, v, w, x), a in state.items():
        if side is Side.ALICE:
            for r, coeff in oracle_rotate_pair(u, v, theta).items():
                acc[(r, u + v - r, w, x)] += a * coeff
        else:
            for r, coeff in oracle_rotate_pair(w, x, theta).items():
                acc[(u, v, r, w + x - r)] += a * coeff
    return PureState(acc, state.cutoff)


def oracle_frame(state: PureState, basis_a: Basis, basis_b: Basis) -> PureState:
    if basis_a is Basis.CROSS:
        state = oracle_rotate(state, -CROSS_ANGLE, Side.ALICE)
    if basis_b is Basis.CROSS:
        state = oracle_rotate(state, -CROSS_ANGLE, Side.BOB)
    return state


def _split_amplitudes(u: int, eta: float):
    """Amplitudes sqrt(C(u,k) eta^k (1-eta)^(u-k)) of |k>_kept |u-k>_lost."""
    return [math.sqrt(math.comb(u, k) * eta ** k * (1 - eta) ** (u - k))
            for k in range(u + 1)]


def dense_outcome_oracle(source, eta: float, basis_a: Basis, basis_b: Basis,
                         loss_first: bool = False) -> dict:
    """Detection probabilities via explicit eight-mode amplitudes.

    With loss_first=True, the beam splitters act before the basis rotation
    (which is then applied to the kept modes only); agreement with the
    default order checks that polarization-isotropic loss commutes with
    the measurement-frame rotation.
    """
    if isinstance(source, PureState):
        source = Ensemble.pure(source)
    table: dict = defaultdict(float)
    for weight, state in source.components:
        if not loss_first:
            state = oracle_frame(state, basis_a, basis_b)
        amp8: dict = defaultdict(complex)
        for (u, v, w, x), a in state.items():
            su, sv = _split_amplitudes(u, eta), _split_amplitudes(v, eta)
            sw, sx = _split_amplitudes(w, eta), _split_amplitudes(x, eta)
            for ka in range(u + 1):
                for kb in range(v + 1):
                    for kc in range(w + 1):
                        for kd in range(x + 1):
                            key = (ka, u - ka, kb, v - kb,
                                   kc, w - kc, kd, x - kd)
                            amp8[key] += a * su[ka] * sv[kb] * sw[kc] * sx[kd]
        if loss_first:
            amp8 = _rotate_kept(amp8, basis_a, basis_b)
        for (ka, _, kb, _, kc, _, kd, _), a in amp8.items():
            table[(ka, kb, kc, kd)] += weight * abs(a) ** 2
    return dict(table)


def _rotate_kept(amp8: dict, basis_a: Basis, basis_b: Basis) -> dict:
    """Rotate the kept (detected) modes of an eight-mode amplitude map."""
    if basis_a is Basis.CROSS:
        nxt: dict = defaultdict(complex)
        for (ka, la, kb, lb, kc, lc, kd, ld), a in amp8.items():
            for r, coeff in oracle_rotate_pair(ka, kb, -CROSS_ANGLE).items():
                nxt[(r, la, ka + kb - r, lb, kc, lc, kd, ld)] += a * coeff
        amp8 = nxt
    if basis_b is Basis.CROSS:
        nxt = defaultdict(complex)
        for (ka, la, kb, lb, kc, lc, kd, ld), a in amp8.items():
            for r, coeff in oracle_rotate_pair(kc, kd, -CROSS_ANGLE).items():
                nxt[(ka, la, kb, lb, r, lc, kc + kd - r, ld)] += a * coeff
        amp8 = nxt
    return amp8


def total_variation(t1: dict, t2: dict) -> float:
    keys = set(t1) | set(t2)
    return 0.5 * sum(abs(t1.get(k, 0.0) - t2.get(k, 0.0)) for k in keys)


def oracle_mutual_information(table: dict) -> float:
    """I(A;B) via the KL form sum p log2(p / (pa pb))."""
    pa: dict = defaultdict(float)
    pb: dict = defaultdict(float)
    for (a, b), p in table.items():
        pa[a] += p
        pb[b] += p
    return sum(p * math.log2(p / (pa[a] * pb[b]))
               for (a, b), p in table.items() if p > 0.0)
