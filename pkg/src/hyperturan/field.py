"""Prime-field scalars and multivariate polynomials over F_q.

Polynomials are stored as an exponent matrix (one row per monomial, graded
lexicographic order) and a coefficient vector.  :func:`sample_poly` fills every
monomial of total degree at most d, which is what the random algebraic
construction needs.  For bulk work :func:`evaluate_grid` evaluates a polynomial
on all of ``F_q^vars`` at once by first reducing it to a function (``x^q = x``)
and then contracting one variable at a time against a power table.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

MONOMIAL_LIMIT = 10**6


class FieldError(ValueError):
    pass


class SmallFieldWarning(UserWarning):
    pass


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def require_prime(q: int) -> int:
    if not is_prime(int(q)):
        raise FieldError(f"q must be prime (got {q})")
    return int(q)


@dataclass(frozen=True)
class Fq:
    """An element of the prime field F_q."""

    value: int
    q: int

    def __post_init__(self) -> None:
        require_prime(self.q)
        object.__setattr__(self, "value", self.value % self.q)

    def _coerce(self, other) -> int:
        if isinstance(other, Fq):
            if other.q != self.q:
                raise FieldError(f"mixing F_{self.q} and F_{other.q}")
            return other.value
        return int(other) % self.q

    def __add__(self, other):
        return Fq(self.value + self._coerce(other), self.q)

    __radd__ = __add__

    def __sub__(self, other):
        return Fq(self.value - self._coerce(other), self.q)

    def __rsub__(self, other):
        return Fq(self._coerce(other) - self.value, self.q)

    def __mul__(self, other):
        return Fq(self.value * self._coerce(other), self.q)

    __rmul__ = __mul__

    def __neg__(self):
        return Fq(-self.value, self.q)

    def inverse(self) -> "Fq":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in a field")
        return Fq(pow(self.value, -1, self.q), self.q)

    def __truediv__(self, other):
        return self * Fq(self._coerce(other), self.q).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return Fq(pow(self.value, e, self.q), self.q)

    def __int__(self) -> int:
        return self.value


# ---------------------------------------------------------------------------
# monomials


def monomial_count(num_vars: int, d: int) -> int:
    return comb(num_vars + d, d)


@lru_cache(maxsize=16)
def _compositions(num_vars: int, t: int) -> np.ndarray:
    """Exponent vectors of total degree exactly t, lex-descending (x0 heaviest first)."""
    if num_vars == 1:
        return np.array([[t]], dtype=np.int64)
    blocks = []
    for e in range(t, -1, -1):
        rest = _compositions(num_vars - 1, t - e)
        head = np.full((rest.shape[0], 1), e, dtype=np.int64)
        blocks.append(np.hstack([head, rest]))
    return np.vstack(blocks)


@lru_cache(maxsize=8)
def monomials(num_vars: int, d: int) -> np.ndarray:
    """All exponent vectors of total degree <= d in graded-lex order."""
    if num_vars < 1:
        raise FieldError("need at least one variable")
    out = np.vstack([_compositions(num_vars, t) for t in range(d + 1)])
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MultiPoly:
    """Polynomial over F_q: ``sum(coeffs[i] * prod(x ** exps[i]))``."""

    q: int
    num_vars: int
    max_degree: int
    exps: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        exps = np.asarray(self.exps, dtype=np.int64).reshape(-1, self.num_vars)
        coeffs = np.asarray(self.coeffs, dtype=np.int64) % self.q
        if exps.shape[0] != coeffs.shape[0]:
            raise FieldError("one coefficient per exponent vector required")
        if exps.size and (exps.min() < 0 or exps.sum(axis=1).max() > self.max_degree):
            raise FieldError(f"monomial of total degree above {self.max_degree}")
        object.__setattr__(self, "exps", exps)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, q: int, num_vars: int, d: int = 0) -> "MultiPoly":
        return cls(q, num_vars, d, np.zeros((0, num_vars), dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def from_terms(cls, q: int, num_vars: int, d: int, terms: dict) -> "MultiPoly":
        """Build from ``{exponent_tuple: coefficient}``."""
        items = sorted(terms.items(), key=lambda kv: _grlex_key(kv[0]))
        exps = np.array([list(e) for e, _ in items], dtype=np.int64).reshape(-1, num_vars)
        coeffs = np.array([c for _, c in items], dtype=np.int64)
        return cls(q, num_vars, d, exps, coeffs)

    def terms(self) -> dict[tuple[int, ...], int]:
        out: dict[tuple[int, ...], int] = {}
        for e, c in zip(self.exps.tolist(), self.coeffs.tolist()):
            key = tuple(e)
            out[key] = (out.get(key, 0) + c) % self.q
        return {e: c for e, c in out.items() if c}

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.q, self.num_vars) == (other.q, other.num_vars) and self.terms() == other.terms()

    def _same_ring(self, other: "MultiPoly") -> None:
        if (self.q, self.num_vars) != (other.q, other.num_vars):
            raise FieldError("polynomials live in different rings")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._same_ring(other)
        t = self.terms()
        for e, c in other.terms().items():
            t[e] = (t.get(e, 0) + c) % self.q
        return MultiPoly.from_terms(self.q, self.num_vars, max(self.max_degree, other.max_degree), t)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        # quadratic in the number of terms; meant for small polynomials
        self._same_ring(other)
        t: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms().items():
            for e2, c2 in other.terms().items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t[e] = (t.get(e, 0) + c1 * c2) % self.q
        return MultiPoly.from_terms(self.q, self.num_vars, self.max_degree + other.max_degree, t)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "vars": self.num_vars,
            "d": self.max_degree,
            "coeffs": [[list(e), c] for e, c in sorted(self.terms().items(), key=lambda kv: _grlex_key(kv[0]))],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MultiPoly":
        try:
            q, nv, d = int(data["q"]), int(data["vars"]), int(data["d"])
            terms = {tuple(int(x) for x in e): int(c) for e, c in data["coeffs"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise FieldError(f"malformed polynomial JSON: {exc}") from None
        require_prime(q)
        return cls.from_terms(q, nv, d, terms)


def _grlex_key(e: Sequence[int]):
    return (sum(e), tuple(-x for x in e))


def sample_poly(q: int, num_vars: int, d: int, rng_seed, limit: int = MONOMIAL_LIMIT) -> MultiPoly:
    """Random polynomial: every monomial of degree <= d gets an independent uniform coefficient.

    ``rng_seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    require_prime(q)
    count = monomial_count(num_vars, d)
    if count > limit:
        raise FieldError(f"{count} monomials of degree <= {d} in {num_vars} variables exceeds the limit {limit}")
    rng = np.random.default_rng(rng_seed)
    exps = monomials(num_vars, d)
    coeffs = rng.integers(0, q, size=exps.shape[0], dtype=np.int64)
    return MultiPoly(q, num_vars, d, exps, coeffs)


@lru_cache(maxsize=8)
def reduced_exponents(q: int, num_vars: int, d: int) -> np.ndarray:
    """Exponent vectors with entries < q and total degree <= d (all of them, C-order)."""
    grid = np.indices((q,) * num_vars).reshape(num_vars, -1).T
    out = grid[grid.sum(axis=1) <= d]
    out.setflags(write=False)
    return out


def sample_reduced(q: int, num_vars: int, d: int, rng_seed) -> MultiPoly:
    """Random polynomial function with the same law as :func:`sample_poly`.

    Reducing a degree-<=d polynomial with ``x^q = x`` sends each monomial to a
    monomial with all exponents < q; the coefficient of a reduced monomial is a
    sum of independent uniforms, hence uniform, as soon as one original
    monomial lands on it, which happens exactly when its total degree is <= d.
    Sampling those coefficients directly costs O(q^vars) instead of
    O(C(vars+d, d)).
    """
    require_prime(q)
    rng = np.random.default_rng(rng_seed)
    exps = reduced_exponents(q, num_vars, d)
    coeffs = rng.integers(0, q, size=exps.shape[0], dtype=np.int64)
    return MultiPoly(q, num_vars, d, exps, coeffs)


def evaluate(p: MultiPoly, point: Sequence[int]) -> int:
    """Exact value of p at a point of F_q^vars."""
    if len(point) != p.num_vars:
        raise FieldError(f"point has {len(point)} coordinates, polynomial has {p.num_vars} variables")
    if p.coeffs.size == 0:
        return 0
    q = p.q
    top = int(p.exps.max())
    x = np.asarray([int(v) % q for v in point], dtype=np.int64)
    # power table pw[i, e] = x_i^e mod q
    pw = np.ones((p.num_vars, top + 1), dtype=np.int64)
    for e in range(1, top + 1):
        pw[:, e] = pw[:, e - 1] * x % q
    terms = p.coeffs.copy()
    for i in range(p.num_vars):
        terms = terms * pw[i, p.exps[:, i]] % q
    return int(terms.sum() % q)


def reduce_to_function(p: MultiPoly) -> np.ndarray:
    """Coefficient tensor of shape (q,)*vars of the reduced polynomial (x^q = x)."""
    q = p.q
    red = p.exps.copy()
    pos = red > 0
    red[pos] = (red[pos] - 1) % (q - 1) + 1
    shape = (q,) * p.num_vars
    flat = np.ravel_multi_index(tuple(red.T), shape)
    # float weights are exact here: each bucket sums at most C(vars+d, d) values below q
    tensor = np.bincount(flat, weights=p.coeffs, minlength=q ** p.num_vars)
    return (tensor.astype(np.int64) % q).reshape(shape)


def evaluate_grid(p: MultiPoly) -> np.ndarray:
    """Values of p at every point of F_q^vars, as an array of shape (q,)*vars."""
    q = p.q
    t = reduce_to_function(p)
    xs = np.arange(q, dtype=np.int64)
    V = np.ones((q, q), dtype=np.int64)  # V[e, x] = x^e, with 0^0 = 1
    for e in range(1, q):
        V[e] = V[e - 1] * xs % q
    for axis in range(p.num_vars):
        t = np.moveaxis(np.tensordot(t, V, axes=([axis], [0])) % q, -1, axis)
    return t


def derive_constants(k, a: int | None = None, b: int | None = None) -> tuple[int, int]:
    """The construction's exponent s = b(b-a+k-1)+a+1 and degree bound d = b*s-1.

    Accepts either ``(k, a, b)`` or a single object with ``k``, ``a``, ``b`` attributes.
    """
    if a is None:
        k, a, b = k.k, k.a, k.b
    s = b * (b - a + k - 1) + a + 1
    return s, b * s - 1


def degree_threshold_warning(q: int, d: int) -> bool:
    """Warn (and return True) when q is below C(d+1, 2)."""
    need = comb(d + 1, 2)
    if q < need:
        warnings.warn(
            f"q={q} is below C(d+1,2)={need}; results are desk-scale diagnostics outside the large-q regime",
            SmallFieldWarning,
            stacklevel=3,
        )
        return True
    return False
