"""Exact arithmetic: sparse fraction-free elimination over Q and the field Q(zeta).

Rows are sparse dicts ``{column: value}`` with int or Fraction values.
Elimination keeps integer rows (each row is cleared of denominators and divided
by its content after every update), so intermediate growth stays bounded
without ever forming fractions.  Fractions only appear when the reduced row
echelon form is normalised for back substitution.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping

from .errors import Inconsistent

SparseRow = Mapping[int, "int | Fraction"]


def _integer_row(row: SparseRow) -> dict[int, int]:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    out = {}
    for c, v in row.items():
        if v:
            out[c] = int(v * den) if den != 1 else int(v)
    return out


def _content(*parts: Mapping) -> int:
    g = 0
    for part in parts:
        for v in part.values():
            g = gcd(g, v)
            if g == 1:
                return 1
    return g


class Echelon:
    """Incremental row echelon form of a sparse rational matrix.

    Rows are added one at a time with :meth:`add`; each new row is reduced
    against the stored pivots and kept if it is independent.  With
    ``track=True`` every stored row remembers the integer combination of the
    original rows that produced it, which is how :func:`solve` produces an
    infeasibility certificate.
    """

    def __init__(self, ncols: int, track: bool = False):
        self.ncols = ncols
        self.track = track
        self.pivots: dict[int, tuple[dict[int, int], dict[int, int]]] = {}
        self._nrows = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: SparseRow, combo: dict[int, int] | None = None):
        row = _integer_row(row)
        combo = dict(combo or {})
        pivots = self.pivots
        while True:
            hit = [c for c in row if c in pivots]
            if not hit:
                return row, combo
            c = min(hit)
            prow, pcombo = pivots[c]
            a, b = prow[c], row[c]
            g = gcd(a, b)
            fa, fb = a // g, b // g
            if fa < 0:
                fa, fb = -fa, -fb
            new = {k: fa * v for k, v in row.items()}
            for k, v in prow.items():
                x = new.get(k, 0) - fb * v
                if x:
                    new[k] = x
                else:
                    new.pop(k, None)
            if self.track:
                ncombo = {k: fa * v for k, v in combo.items()}
                for k, v in pcombo.items():
                    x = ncombo.get(k, 0) - fb * v
                    if x:
                        ncombo[k] = x
                    else:
                        ncombo.pop(k, None)
                combo = ncombo
            g = _content(new, combo) if self.track else _content(new)
            if g > 1:
                new = {k: v // g for k, v in new.items()}
                if self.track:
                    combo = {k: v // g for k, v in combo.items()}
            row = new

    def add(self, row: SparseRow) -> bool:
        """Add a row; return True if it raised the rank."""
        idx = self._nrows
        self._nrows += 1
        reduced, combo = self.reduce(row, {idx: 1} if self.track else None)
        if not reduced:
            return False
        c = min(reduced)
        if reduced[c] < 0:
            reduced = {k: -v for k, v in reduced.items()}
            combo = {k: -v for k, v in combo.items()}
        self.pivots[c] = (reduced, combo)
        return True

    def rref(self) -> dict[int, dict[int, Fraction]]:
        """Reduced rows keyed by pivot column, pivot entries equal to 1."""
        done: dict[int, dict[int, Fraction]] = {}
        for c in sorted(self.pivots, reverse=True):
            row = self.pivots[c][0]
            p = row[c]
            r = {k: Fraction(v, p) for k, v in row.items()}
            for k in [k for k in r if k != c and k in done]:
                f = r.pop(k)
                for j, v in done[k].items():
                    if j == k:
                        continue
                    x = r.get(j, 0) - f * v
                    if x:
                        r[j] = x
                    else:
                        r.pop(j, None)
            done[c] = r
        return done

    def nullspace(self) -> list[dict[int, Fraction]]:
        reduced = self.rref()
        by_free: dict[int, dict[int, Fraction]] = {}
        for p, r in reduced.items():
            for j, v in r.items():
                if j != p:
                    by_free.setdefault(j, {})[p] = -v
        basis = []
        for f in range(self.ncols):
            if f in reduced:
                continue
            vec = {f: Fraction(1)}
            vec.update(by_free.get(f, {}))
            basis.append(vec)
        return basis


def rank(rows: Iterable[SparseRow], ncols: int) -> int:
    ech = Echelon(ncols)
    for r in rows:
        ech.add(r)
    return ech.rank


def nullspace(rows: Iterable[SparseRow], ncols: int) -> list[dict[int, Fraction]]:
    """Exact basis of ``{x : row . x = 0 for every row}``, one vector per free column."""
    ech = Echelon(ncols)
    for r in rows:
        ech.add(r)
    return ech.nullspace()


def solve(rows: list[SparseRow], rhs: list, ncols: int):
    """Solve ``A x = b`` exactly.

    Returns ``(x, kernel)`` where ``x`` is the particular solution with every
    free variable set to zero and ``kernel`` is a nullspace basis of ``A``.
    Raises :class:`Inconsistent` with a row-combination certificate when the
    system has no solution.
    """
    ech = Echelon(ncols + 1, track=True)
    for row, b in zip(rows, rhs):
        full = dict(row)
        if b:
            full[ncols] = b
        ech.add(full)
    if ncols in ech.pivots:
        raise Inconsistent(dict(ech.pivots[ncols][1]))
    reduced = ech.rref()
    x = {}
    for p, r in reduced.items():
        v = r.get(ncols, 0)
        if v:
            x[p] = Fraction(v)
    # the augmented column is free; its own basis vector is not a kernel element of A
    kernel = [vec for vec in ech.nullspace() if ncols not in vec]
    return x, kernel


def div(a, b):
    """Exact division for ints, plain division for everything else."""
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def matvec(rows: Iterable[SparseRow], x: Mapping[int, object]) -> list:
    return [sum((v * x.get(c, 0) for c, v in r.items()), 0) for r in rows]


class QZeta:
    """Element ``a + b*zeta`` of Q(zeta), zeta a primitive cube root of unity.

    Uses ``zeta**2 = -1 - zeta``.  Interoperates with int and Fraction.
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _lift(x) -> "QZeta":
        if isinstance(x, QZeta):
            return x
        if isinstance(x, (int, Fraction)):
            return QZeta(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QZeta(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QZeta(-self.a, -self.b)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QZeta(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        # (a + b z)(c + d z) = ac + (ad + bc) z + bd z^2,  z^2 = -1 - z
        a, b, c, d = self.a, self.b, o.a, o.b
        return QZeta(a * c - b * d, a * d + b * c - b * d)

    __rmul__ = __mul__

    def conjugate(self) -> "QZeta":
        # a + b z^2 = (a - b) - b z
        return QZeta(self.a - self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def inverse(self) -> "QZeta":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QZeta division by zero")
        c = self.conjugate()
        return QZeta(c.a / n, c.b / n)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        out, base = QZeta(1), self
        if k < 0:
            base, k = base.inverse(), -k
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __complex__(self):
        # zeta = -1/2 + i sqrt(3)/2
        return complex(float(self.a) - float(self.b) / 2, float(self.b) * 3 ** 0.5 / 2)

    def __repr__(self):
        return f"QZeta({self.a}, {self.b})"


ZETA = QZeta(0, 1)


def format_exact(x) -> str:
    """``p/q`` for rationals, ``a+b*zeta`` for Q(zeta), decimal repr for floats."""
    if isinstance(x, QZeta):
        return f"{format_exact(x.a)}{'+' if x.b >= 0 else '-'}{format_exact(abs(x.b))}*zeta"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def parse_exact(s: str):
    s = s.strip()
    if s.endswith("*zeta"):
        # split at the sign joining the two parts (not a leading sign)
        body = s[: -len("*zeta")]
        i = max(body.rfind("+"), body.rfind("-"))
        return QZeta(Fraction(body[:i]), Fraction(body[i:]))
    if any(ch in s for ch in ".eE") and "/" not in s:
        return float(s)
    return Fraction(s)
