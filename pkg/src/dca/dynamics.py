"""Symbolic dynamics of boundary words under the pair-insertion map T.

Between every two neighbouring letters a block is inserted and then the old
letters are deleted::

    bw -> bwbw    wb -> wbwb    bb -> bwb    ww -> wbw

Recoded letters name a letter together with its left neighbour: the pair
``xy`` becomes ``y_x`` (so ``bw`` is ``w_b``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import LengthCap, TooShort

RULES = {"bw": "bwbw", "wb": "wbwb", "bb": "bwb", "ww": "wbw"}
ALPHABET = ("w_b", "b_w", "w_w", "b_b")
LAMBDA = 2 + math.sqrt(3)


@dataclass(frozen=True)
class Word:
    letters: str
    cyclic: bool = True

    def __post_init__(self):
        if not self.letters:
            raise TooShort("empty word")
        if set(self.letters) - {"b", "w"}:
            raise ValueError("letters must be 'b' or 'w'")

    def __len__(self) -> int:
        return len(self.letters)

    def pairs(self) -> list[str]:
        s = self.letters
        n = len(s)
        if self.cyclic:
            return [s[i] + s[(i + 1) % n] for i in range(n)]
        return [s[i] + s[i + 1] for i in range(n - 1)]

    def count(self, letter: str) -> int:
        return self.letters.count(letter)

    def swapped(self) -> "Word":
        return Word(self.letters.translate(str.maketrans("bw", "wb")), self.cyclic)

    def equivalent(self, other: "Word") -> bool:
        """Equality, up to rotation for cyclic words."""
        if self.cyclic != other.cyclic or len(self) != len(other):
            return False
        if not self.cyclic:
            return self.letters == other.letters
        return other.letters in self.letters + self.letters


def substitute(word: Word) -> Word:
    """One application of T: the concatenation of the blocks of all adjacent
    pairs, old letters dropped.

    Linear words use only their internal pairs (no wrap-around pair).
    """
    if len(word) < 2:
        raise TooShort("substitution needs at least two letters")
    return Word("".join(RULES[p] for p in word.pairs()), word.cyclic)


def substitution_length(word: Word) -> int:
    pairs = word.pairs()
    alt = sum(1 for p in pairs if p[0] != p[1])
    return 4 * alt + 3 * (len(pairs) - alt)


def recode(word: Word) -> tuple[str, ...]:
    """Letter ``x_i`` becomes ``x_i`` subscript ``x_{i-1}``.

    For cyclic words the first letter is paired with the last one; a linear
    word loses its first letter, which :func:`decode` restores.
    """
    if len(word) < 2:
        raise TooShort("recoding needs at least two letters")
    s = word.letters
    start = 0 if word.cyclic else 1
    return tuple(f"{s[i]}_{s[i - 1]}" for i in range(start, len(s)))


def decode(symbols: Sequence[str], cyclic: bool = True) -> Word:
    if not symbols:
        raise TooShort("nothing to decode")
    bad = [s for s in symbols if s not in ALPHABET]
    if bad:
        raise ValueError(f"unknown symbols {bad[:3]}")
    n = len(symbols)
    links = range(n) if cyclic else range(1, n)
    for i in links:
        if symbols[i][2] != symbols[i - 1][0]:
            raise ValueError(f"{symbols[i - 1]} cannot be followed by {symbols[i]}")
    body = "".join(s[0] for s in symbols)
    return Word(body if cyclic else symbols[0][2] + body, cyclic)


def recoded_rules() -> dict[str, tuple[str, ...]]:
    """Image of each recoded symbol.

    The symbol for the pair ``xy`` maps to the pairs inside the block of
    ``xy`` followed by the junction pair ``yy`` with the next block.
    """
    out = {}
    for sym in ALPHABET:
        cur, prev = sym[0], sym[2]
        block = RULES[prev + cur]
        inner = [f"{block[j]}_{block[j - 1]}" for j in range(1, len(block))]
        out[sym] = tuple(inner) + (f"{cur}_{cur}",)
    return out


def recoded_substitute(symbols: Sequence[str]) -> tuple[str, ...]:
    rules = recoded_rules()
    return tuple(s for sym in symbols for s in rules[sym])


def abelianization_matrix() -> list[list[int]]:
    """``A[target][source]`` = occurrences of ``target`` in the image of
    ``source``, alphabet order (w_b, b_w, w_w, b_b)."""
    rules = recoded_rules()
    return [[rules[src].count(tgt) for src in ALPHABET] for tgt in ALPHABET]


@dataclass(frozen=True)
class PerronCertificate:
    matrix: tuple[tuple[int, ...], ...]
    charpoly: tuple[int, ...]
    factor: tuple[int, ...]
    cofactor: tuple[int, ...]
    quotient: tuple[tuple[int, int], tuple[int, int]]
    primitive_power: int
    cofactor_root_bound: Fraction
    value: float

    @property
    def valid(self) -> bool:
        return (
            self.factor == (1, -4, 1)
            and self.primitive_power > 0
            and (self.cofactor_root_bound - 2) ** 2 < 3
            and abs(self.value - LAMBDA) < 1e-12
        )


def _primitive_power(A: list[list[int]], limit: int = 16) -> int:
    n = len(A)
    P = [row[:] for row in A]
    for k in range(1, limit + 1):
        if all(P[i][j] > 0 for i in range(n) for j in range(n)):
            return k
        P = [[sum(P[i][l] * A[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
    return 0


def perron_certificate() -> PerronCertificate:
    """Exact certificate that the spectral radius of A is ``2 + sqrt 3``.

    ``lambda^2 - 4 lambda + 1`` divides the characteristic polynomial; every
    root of the cofactor has modulus at most its Cauchy bound, which is below
    ``2 + sqrt 3`` (checked as ``(bound - 2)^2 < 3``), and A is primitive so its
    spectral radius is a simple root of the characteristic polynomial.
    """
    A = abelianization_matrix()
    x = sympy.Symbol("x")
    cp = sympy.Poly(sympy.Matrix(A).charpoly(x).as_expr(), x)
    factor = sympy.Poly(x**2 - 4 * x + 1, x)
    cof, rem = sympy.div(cp, factor)
    if not rem.is_zero:
        raise ArithmeticError("lambda^2 - 4 lambda + 1 does not divide the characteristic polynomial")
    cc = [int(c) for c in cof.all_coeffs()]
    bound = 1 + max((Fraction(abs(c), abs(cc[0])) for c in cc[1:]), default=Fraction(0))
    # b <-> w swap pairs (w_b, b_w) and (w_w, b_b); symmetric vectors see this 2x2 block
    quotient = ((A[0][0] + A[0][1], A[0][2] + A[0][3]), (A[2][0] + A[2][1], A[2][2] + A[2][3]))
    return PerronCertificate(
        matrix=tuple(tuple(r) for r in A),
        charpoly=tuple(int(c) for c in cp.all_coeffs()),
        factor=(1, -4, 1),
        cofactor=tuple(cc),
        quotient=quotient,
        primitive_power=_primitive_power(A),
        cofactor_root_bound=bound,
        value=2 + math.sqrt(3),
    )


@dataclass
class GrowthSeries:
    lengths: list[int]
    ratios: list[float]
    deviations: list[float]


def growth_series(word: Word, steps: int, cap: int = 10_000_000) -> GrowthSeries:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    lengths = [len(word)]
    w = word
    for _ in range(steps):
        nxt_len = substitution_length(w)
        if nxt_len > cap:
            raise LengthCap(f"next word would have {nxt_len} letters (cap {cap})")
        w = substitute(w)
        lengths.append(len(w))
    ratios = [b / a for a, b in zip(lengths, lengths[1:])]
    return GrowthSeries(lengths, ratios, [abs(r - LAMBDA) for r in ratios])
