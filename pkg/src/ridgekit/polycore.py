"""Polynomial algebra over multi-indices.

Real multivariate polynomials are stored as sparse maps from exponent
multi-indices to coefficients; complex polynomials in (z, conj(z)) are keyed
by pairs of multi-indices.  Coefficients may be floats, Fractions, or exact
complex rationals, so the same algebra serves both floating-point quadrature
work and exact identity checking.
"""

import json
import math
from fractions import Fraction

import numpy as np

ZERO_PRUNE_FLOAT = 1e-300


class MultiIndex(tuple):
    """Tuple of non-negative integer exponents."""

    def __new__(cls, entries):
        entries = tuple(int(e) for e in entries)
        if any(e < 0 for e in entries):
            raise ValueError("multi-index entries must be non-negative")
        return super().__new__(cls, entries)

    def order(self):
        return sum(self)

    def factorial(self):
        out = 1
        for e in self:
            out *= math.factorial(e)
        return out


def grlex_key(k):
    """Sort key for graded lexicographic order."""
    return (sum(k), tuple(k))


def monomials_up_to(dim, max_degree):
    """All exponent tuples of length `dim` with total degree <= max_degree,
    in graded lexicographic order."""
    out = []
    for total in range(max_degree + 1):
        out.extend(_homogeneous_exponents(dim, total))
    return out


def _homogeneous_exponents(dim, total):
    if dim == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in _homogeneous_exponents(dim - 1, total - first):
            out.append((first,) + rest)
    return out


def rank_grlex(k):
    """Position of exponent tuple `k` in the graded lexicographic enumeration
    of all multi-indices of its length (0-based)."""
    dim = len(k)
    total = sum(k)
    rank = math.comb(total + dim - 1, dim) if total > 0 else 0  # all lower degrees
    # rank within the homogeneous block, lexicographic on the tuple
    remaining = total
    for pos in range(dim - 1):
        for smaller in range(k[pos]):
            rank += math.comb(remaining - smaller + dim - pos - 2, dim - pos - 2)
        remaining -= k[pos]
    return rank


def unrank_grlex(dim, rank):
    """Inverse of rank_grlex for multi-indices of length `dim`."""
    if rank < 0:
        raise ValueError("rank must be non-negative")
    total = 0
    while math.comb(total + dim, dim) <= rank:
        total += 1
    rank -= math.comb(total + dim - 1, dim) if total > 0 else 0
    out = []
    remaining = total
    for pos in range(dim - 1):
        entry = 0
        while True:
            block = math.comb(remaining - entry + dim - pos - 2, dim - pos - 2)
            if rank < block:
                break
            rank -= block
            entry += 1
        out.append(entry)
        remaining -= entry
    out.append(remaining)
    return tuple(out)


def dim_homogeneous(m, s):
    """Dimension of the space of homogeneous degree-s polynomials in m variables."""
    if m < 1 or s < 0:
        raise ValueError("need m >= 1 and s >= 0")
    return math.comb(s + m - 1, m - 1)


def dim_complex_bihomogeneous(d, s, t):
    """Complex dimension of the span of z^k conj(z)^l with |k| = s, |l| = t."""
    if d < 1 or s < 0 or t < 0:
        raise ValueError("need d >= 1 and s, t >= 0")
    return math.comb(s + d - 1, d - 1) * math.comb(t + d - 1, d - 1)


def _is_zero_coeff(c):
    if isinstance(c, (float, complex, np.floating, np.complexfloating)):
        return abs(c) < ZERO_PRUNE_FLOAT
    return c == 0


class ExactComplex:
    """Complex number with Fraction real and imaginary parts.

    Supports the handful of ring operations the exact identity checks need.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        other = _as_exact(other)
        return ExactComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_exact(other)
        return ExactComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_exact(other) - self

    def __mul__(self, other):
        other = _as_exact(other)
        return ExactComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, ExactComplex):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def conjugate(self):
        return ExactComplex(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"ExactComplex({self.re!r}, {self.im!r})"


def _as_exact(value):
    if isinstance(value, ExactComplex):
        return value
    if isinstance(value, (int, Fraction)):
        return ExactComplex(value, 0)
    raise TypeError(f"cannot mix {type(value).__name__} into exact complex arithmetic")


class MultiIndexPolynomial:
    """Sparse real polynomial in `dim` variables keyed by multi-indices."""

    def __init__(self, dim, terms=None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)
        data = {}
        if terms:
            for k, c in terms.items():
                k = MultiIndex(k)
                if len(k) != self.dim:
                    raise ValueError(f"exponent {tuple(k)} has wrong length for dim={dim}")
                if k in data:
                    c = data[k] + c
                data[k] = c
        self.terms = {k: c for k, c in sorted(data.items(), key=lambda kv: grlex_key(kv[0]))
                      if not _is_zero_coeff(c)}

    @classmethod
    def zero(cls, dim):
        return cls(dim, {})

    @classmethod
    def constant(cls, dim, value):
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def monomial(cls, exponents, coeff=1):
        return cls(len(exponents), {tuple(exponents): coeff})

    def degree(self):
        if not self.terms:
            return -math.inf
        return max(k.order() for k in self.terms)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        self._check_dim(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return MultiIndexPolynomial(self.dim, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor):
        return MultiIndexPolynomial(self.dim, {k: c * factor for k, c in self.terms.items()})

    def __mul__(self, other):
        self._check_dim(other)
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + c1 * c2
        return MultiIndexPolynomial(self.dim, out)

    def _check_dim(self, other):
        if not isinstance(other, MultiIndexPolynomial):
            raise TypeError("expected MultiIndexPolynomial")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def eval(self, x):
        if len(x) != self.dim:
            raise ValueError(f"point has length {len(x)}, expected {self.dim}")
        total = 0
        for k, c in self.terms.items():
            term = c
            for xi, e in zip(x, k):
                if e:
                    term = term * xi ** e
            total = total + term
        return total

    def eval_many(self, points):
        """Evaluate at an (n, dim) array of points; returns length-n array."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[None, :]
        if points.shape[1] != self.dim:
            raise ValueError(f"points have dimension {points.shape[1]}, expected {self.dim}")
        out = np.zeros(points.shape[0])
        for k, c in self.terms.items():
            term = np.full(points.shape[0], float(c))
            for j, e in enumerate(k):
                if e:
                    term *= points[:, j] ** e
            out += term
        return out

    __call__ = eval_many

    def compose_linear(self, A, b=None):
        """Return the polynomial x -> P(A x + b), where A maps R^d_out -> R^dim."""
        A = [list(row) for row in A]
        if len(A) != self.dim:
            raise ValueError(f"matrix has {len(A)} rows, expected {self.dim}")
        d_out = len(A[0]) if A else 0
        if any(len(row) != d_out for row in A):
            raise ValueError("ragged matrix")
        if d_out < 1:
            raise ValueError("output dimension must be positive")
        if b is None:
            b = [0] * self.dim
        if len(b) != self.dim:
            raise ValueError("bias has wrong length")
        lines = []
        for i in range(self.dim):
            terms = {(0,) * d_out: b[i]}
            for j in range(d_out):
                key = tuple(1 if jj == j else 0 for jj in range(d_out))
                terms[key] = A[i][j]
            lines.append(MultiIndexPolynomial(d_out, terms))
        out = MultiIndexPolynomial.zero(d_out)
        power_cache = [{0: MultiIndexPolynomial.constant(d_out, 1)} for _ in range(self.dim)]
        for k, c in self.terms.items():
            term = MultiIndexPolynomial.constant(d_out, c)
            for i, e in enumerate(k):
                if e not in power_cache[i]:
                    p = max(q for q in power_cache[i] if q < e)
                    acc = power_cache[i][p]
                    while p < e:
                        acc = acc * lines[i]
                        p += 1
                        power_cache[i][p] = acc
                term = term * power_cache[i][e]
            out = out + term
        return out

    def coefficient_vector(self, max_degree):
        """Dense grlex-ordered coefficient vector covering degrees <= max_degree."""
        exps = monomials_up_to(self.dim, max_degree)
        index = {k: i for i, k in enumerate(exps)}
        vec = np.zeros(len(exps))
        for k, c in self.terms.items():
            if k.order() > max_degree:
                raise ValueError("polynomial degree exceeds requested vector size")
            vec[index[tuple(k)]] = float(c)
        return vec

    @classmethod
    def from_coefficient_vector(cls, dim, vec, prune_tol=0.0):
        exps = monomials_up_to(dim, _degree_for_length(dim, len(vec)))
        if len(exps) != len(vec):
            raise ValueError("vector length is not a full graded block")
        terms = {k: float(c) for k, c in zip(exps, vec) if abs(c) > prune_tol}
        return cls(dim, terms)

    def map_coefficients(self, fn):
        return MultiIndexPolynomial(self.dim, {k: fn(c) for k, c in self.terms.items()})

    def to_json_dict(self):
        return {
            "dim": self.dim,
            "terms": [{"k": list(k), "c": float(c)} for k, c in self.terms.items()],
        }

    @classmethod
    def from_json_dict(cls, obj):
        return cls(obj["dim"], {tuple(t["k"]): t["c"] for t in obj["terms"]})

    def to_json(self):
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))

    def __eq__(self, other):
        return (isinstance(other, MultiIndexPolynomial)
                and self.dim == other.dim and self.terms == other.terms)

    def __repr__(self):
        body = " + ".join(f"{c}*x^{tuple(k)}" for k, c in self.terms.items()) or "0"
        return f"MultiIndexPolynomial(dim={self.dim}: {body})"


def _degree_for_length(dim, length):
    degree = 0
    while math.comb(degree + dim, dim) < length:
        degree += 1
    return degree


class ComplexBiPolynomial:
    """Polynomial in z and conj(z) over C^dim, keyed by multi-index pairs."""

    def __init__(self, dim, terms=None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)
        data = {}
        if terms:
            for (k, l), c in terms.items():
                k, l = MultiIndex(k), MultiIndex(l)
                if len(k) != self.dim or len(l) != self.dim:
                    raise ValueError("exponent pair has wrong length")
                key = (k, l)
                if key in data:
                    c = data[key] + c
                data[key] = c
        self.terms = {
            key: c
            for key, c in sorted(data.items(), key=lambda kv: (grlex_key(kv[0][0]), grlex_key(kv[0][1])))
            if not _is_zero_coeff(c)
        }

    @classmethod
    def zero(cls, dim):
        return cls(dim, {})

    @classmethod
    def constant(cls, dim, value):
        z = (0,) * dim
        return cls(dim, {(z, z): value})

    def holomorphic_degree(self):
        if not self.terms:
            return -math.inf
        return max(k.order() for k, _ in self.terms)

    def antiholomorphic_degree(self):
        if not self.terms:
            return -math.inf
        return max(l.order() for _, l in self.terms)

    def in_degree_class(self, s):
        """Membership in P_s(C^d): both partial degrees at most s."""
        return self.holomorphic_degree() <= s and self.antiholomorphic_degree() <= s

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        self._check_dim(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return ComplexBiPolynomial(self.dim, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor):
        return ComplexBiPolynomial(self.dim, {key: c * factor for key, c in self.terms.items()})

    def __mul__(self, other):
        self._check_dim(other)
        out = {}
        for (k1, l1), c1 in self.terms.items():
            for (k2, l2), c2 in other.terms.items():
                key = (tuple(a + b for a, b in zip(k1, k2)),
                       tuple(a + b for a, b in zip(l1, l2)))
                out[key] = out.get(key, 0) + c1 * c2
        return ComplexBiPolynomial(self.dim, out)

    def conjugate(self):
        out = {}
        for (k, l), c in self.terms.items():
            out[(tuple(l), tuple(k))] = _conj(c)
        return ComplexBiPolynomial(self.dim, out)

    def _check_dim(self, other):
        if not isinstance(other, ComplexBiPolynomial):
            raise TypeError("expected ComplexBiPolynomial")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def eval(self, z):
        if len(z) != self.dim:
            raise ValueError("point has wrong length")
        total = 0
        for (k, l), c in self.terms.items():
            term = c if not isinstance(c, ExactComplex) else complex(c)
            for zj, e in zip(z, k):
                if e:
                    term = term * zj ** e
            for zj, e in zip(z, l):
                if e:
                    term = term * zj.conjugate() ** e
            total = total + term
        return total

    def eval_many(self, points):
        """Evaluate at an (n, dim) complex array; returns length-n complex array."""
        points = np.asarray(points, dtype=complex)
        if points.ndim == 1:
            points = points[None, :]
        out = np.zeros(points.shape[0], dtype=complex)
        conj = np.conj(points)
        for (k, l), c in self.terms.items():
            term = np.full(points.shape[0], complex(c))
            for j, e in enumerate(k):
                if e:
                    term *= points[:, j] ** e
            for j, e in enumerate(l):
                if e:
                    term *= conj[:, j] ** e
            out += term
        return out

    __call__ = eval_many

    def map_coefficients(self, fn):
        return ComplexBiPolynomial(self.dim, {key: fn(c) for key, c in self.terms.items()})

    def to_complex_floats(self):
        return self.map_coefficients(complex)

    def to_json_dict(self):
        items = []
        for (k, l), c in self.terms.items():
            c = complex(c)
            items.append({"k": list(k), "l": list(l), "re": c.real, "im": c.imag})
        return {"dim": self.dim, "terms": items}

    @classmethod
    def from_json_dict(cls, obj):
        terms = {}
        for t in obj["terms"]:
            terms[(tuple(t["k"]), tuple(t["l"]))] = complex(t["re"], t["im"])
        return cls(obj["dim"], terms)

    def to_json(self):
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))

    def __eq__(self, other):
        return (isinstance(other, ComplexBiPolynomial)
                and self.dim == other.dim and self.terms == other.terms)

    def __repr__(self):
        body = " + ".join(f"{c}*z^{tuple(k)}conj^{tuple(l)}" for (k, l), c in self.terms.items()) or "0"
        return f"ComplexBiPolynomial(dim={self.dim}: {body})"


def _conj(c):
    if isinstance(c, (int, float, Fraction, np.floating)):
        return c
    return c.conjugate()
