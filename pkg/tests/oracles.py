"""Classical reference computations, independent of the circuit builders."""

import math
from fractions import Fraction

import numpy as np


def bit_reverse(value, width):
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def qft_vector(a, n):
    """Swap-free QFT of |a>: amplitude of |y> is exp(2 pi i a rev(y) / 2^n) / sqrt(2^n)."""
    size = 1 << n
    ys = np.arange(size)
    rev = np.array([bit_reverse(int(y), n) for y in ys])
    return np.exp(2j * np.pi * a * rev / size) / np.sqrt(size)


def fourier_phase_list(value, width):
    """Per-qubit phases MSB first, as a binary-fraction computation by hand."""
    bits = [(value >> (width - 1 - i)) & 1 for i in range(width)]
    phases = []
    for j in range(width):
        # qubit j carries 0.b_j b_{j+1} ... b_n
        frac = sum(Fraction(b, 2 ** (i + 1)) for i, b in enumerate(bits[j:]))
        phases.append(frac)
    return phases


def truncated_weight(k, t):
    if k in (0, 1):
        return 2 ** t
    return math.floor(Fraction(2 ** t, math.factorial(k)))


def series_oracle(x, order, t, weights=None):
    """Fixed-point sum of truncated weights times powers: (mantissa, exponent)."""
    if weights is None:
        weights = [truncated_weight(k, t) for k in range(order + 1)]
    mantissa = 0
    for k in range(order + 1):
        mantissa += weights[k] * x ** k
    return mantissa, -t


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)
