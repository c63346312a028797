"""Seeded random finite structures and elements.

Small on purpose: these exist to cross-validate the four decision routes
(graph classification, window triangularisation, subspace-chain brute force,
sampled principal powers) against each other on thousands of cases, so the
instances stay tiny and the weights stay simple nonzero rationals.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .algebra import Element
from .errors import InvalidParams
from .graph import EvolutionStructure
from .scalars import EX_ONE, ExactScalar

EDGE_PROBS = (0.2, 0.4)
MAX_N = 6
_TERM = 7  # numerators and denominators are drawn from 1.._TERM


def _rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


def _random_weight(rng: random.Random) -> ExactScalar:
    num = rng.randint(1, _TERM) * rng.choice((-1, 1))
    den = rng.randint(1, _TERM)
    return ExactScalar.from_rational(Fraction(num, den))


def random_finite_structure(seed, n=None, p=None) -> EvolutionStructure:
    """Random exact-mode structure on at most six vertices.

    Every potential edge (i, k) is kept with probability `p` (drawn from
    EDGE_PROBS when not given); weights are uniform nonzero rationals with
    numerator and denominator at most 7.  Deterministic in the seed.
    """
    rng = _rng(seed)
    if n is None:
        n = rng.randint(2, MAX_N)
    if not 1 <= n <= MAX_N:
        raise InvalidParams(f"random structures are capped at n <= {MAX_N}")
    if p is None:
        p = rng.choice(EDGE_PROBS)
    if not 0 < p < 1:
        raise InvalidParams("edge probability must be in (0, 1)")
    rows = {}
    for i in range(1, n + 1):
        entries = [(k, _random_weight(rng))
                   for k in range(1, n + 1) if rng.random() < p]
        if entries:
            rows[i] = entries
    return EvolutionStructure.from_rows(rows, n, "exact")


def random_element(seed, n: int, density: float = 0.7,
                   imaginary: float = 0.25) -> Element:
    """Random exact element supported on {1..n}; never the zero element."""
    rng = _rng(seed)
    coeffs = {}
    for i in range(1, n + 1):
        if rng.random() >= density:
            continue
        re = Fraction(rng.randint(-_TERM, _TERM), rng.randint(1, _TERM))
        im = Fraction(0)
        if rng.random() < imaginary:
            im = Fraction(rng.randint(-_TERM, _TERM), rng.randint(1, _TERM))
        if re or im:
            coeffs[i] = ExactScalar.from_rational(re, im)
    if not coeffs:
        coeffs[rng.randint(1, n)] = EX_ONE
    return Element(coeffs)
