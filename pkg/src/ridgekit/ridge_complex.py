"""Wirtinger polynomial calculus and complex ridge decomposition.

Polynomials in z and conj(z) are differentiated termwise in the (k, l)
exponent representation, so the monomial pairing identities hold exactly in
rational arithmetic.  The decomposition expresses every bidegree component of
a polynomial on C^d in the span of powers (a_j . z)^s (conj(a_j . z))^t of
certified directions, yielding univariate profiles in (w, conj(w)).
"""

import math
from fractions import Fraction

import numpy as np

from .polycore import (ComplexBiPolynomial, ExactComplex, MultiIndexPolynomial,
                       _homogeneous_exponents, dim_complex_bihomogeneous)

RANK_TOLERANCE = 1e-10
DEFAULT_RETRIES = 50


class SpanningError(RuntimeError):
    pass


class DecompositionError(RuntimeError):
    pass


def wirtinger_derivative(P, kind, j):
    """Single Wirtinger derivative: kind 'holomorphic' lowers the z-exponent
    of variable j, 'antiholomorphic' lowers the conj(z)-exponent."""
    if not 1 <= j <= P.dim:
        raise ValueError(f"variable index {j} out of range")
    if kind not in ("holomorphic", "antiholomorphic"):
        raise ValueError("kind must be 'holomorphic' or 'antiholomorphic'")
    pos = j - 1
    out = {}
    for (k, l), c in P.terms.items():
        exps = k if kind == "holomorphic" else l
        if exps[pos] == 0:
            continue
        lowered = list(exps)
        lowered[pos] -= 1
        key = (tuple(lowered), tuple(l)) if kind == "holomorphic" else (tuple(k), tuple(lowered))
        out[key] = out.get(key, 0) + c * exps[pos]
    return ComplexBiPolynomial(P.dim, out)


def apply_wirtinger(P, k, l):
    """Iterated operator: d^k dbar^l applied to P."""
    out = P
    for j, e in enumerate(k, start=1):
        for _ in range(e):
            out = wirtinger_derivative(out, "holomorphic", j)
    for j, e in enumerate(l, start=1):
        for _ in range(e):
            out = wirtinger_derivative(out, "antiholomorphic", j)
    return out


def _constant_term(P):
    zero = ((0,) * P.dim, (0,) * P.dim)
    return P.terms.get(zero, 0)


def verify_wirtinger_monomial_identity(k, l, k_prime, l_prime):
    """Exact check that d^k dbar^l (z^k' conj(z)^l') equals the indicator
    1[(k,l) = (k',l')] times k! l!, for equal-order index pairs."""
    k, l, k_prime, l_prime = map(tuple, (k, l, k_prime, l_prime))
    if sum(k) != sum(k_prime) or sum(l) != sum(l_prime):
        raise ValueError("identity requires |k| = |k'| and |l| = |l'|")
    mono = ComplexBiPolynomial(len(k), {(k_prime, l_prime): 1})
    result = apply_wirtinger(mono, k, l)
    if (k, l) == (k_prime, l_prime):
        expected = ComplexBiPolynomial(len(k), {
            ((0,) * len(k), (0,) * len(k)):
            math.prod(math.factorial(e) for e in k)
            * math.prod(math.factorial(e) for e in l)
        })
    else:
        expected = ComplexBiPolynomial.zero(len(k))
    return result == expected


def _power_pair(a, s, t, dim):
    """(a . z)^s (conj(a . z))^t as a ComplexBiPolynomial, coefficients exact
    when the entries of a are exact."""
    zero = (0,) * dim
    lin = ComplexBiPolynomial(dim, {
        (tuple(1 if j == i else 0 for j in range(dim)), zero): a[i]
        for i in range(dim)
    })
    lin_bar = ComplexBiPolynomial(dim, {
        (zero, tuple(1 if j == i else 0 for j in range(dim))): _conj(a[i])
        for i in range(dim)
    })
    out = ComplexBiPolynomial.constant(dim, _one_like(a))
    for _ in range(s):
        out = out * lin
    for _ in range(t):
        out = out * lin_bar
    return out


def _one_like(a):
    return ExactComplex(1, 0) if any(isinstance(x, ExactComplex) for x in a) else 1


def _conj(c):
    if isinstance(c, (int, float, Fraction)):
        return c
    return c.conjugate()


def verify_power_identity(a, k, l, tol=1e-10):
    """Check d^k dbar^l ((a.z)^s (conj(a.z))^t) = s! t! a^k conj(a)^l with
    s = |k|, t = |l|; exact for ExactComplex/rational entries, to `tol` for
    floats."""
    k, l = tuple(k), tuple(l)
    dim = len(k)
    if len(l) != dim or len(a) != dim:
        raise ValueError("dimension mismatch")
    s, t = sum(k), sum(l)
    power = _power_pair(list(a), s, t, dim)
    result = _constant_term(apply_wirtinger(power, k, l))
    expected = _one_like(a) * math.factorial(s) * math.factorial(t)
    for i in range(dim):
        for _ in range(k[i]):
            expected = expected * a[i]
        for _ in range(l[i]):
            expected = expected * _conj(a[i])
    exact = any(isinstance(x, ExactComplex) for x in a) or all(
        isinstance(x, (int, Fraction)) for x in a)
    if exact:
        diff = _as_exact_complex(result) - _as_exact_complex(expected)
        return diff.re == 0 and diff.im == 0
    return abs(complex(result) - complex(expected)) <= tol * (1 + abs(complex(expected)))


def _as_exact_complex(c):
    if isinstance(c, ExactComplex):
        return c
    return ExactComplex(Fraction(c), 0)


def apply_differential_operator(Q, P):
    """Test-only pairing Q(D)P: sum over the terms a z^k conj(z)^l of Q of
    a * d^k dbar^l P."""
    if Q.dim != P.dim:
        raise ValueError("dimension mismatch")
    out = ComplexBiPolynomial.zero(P.dim)
    for (k, l), c in Q.terms.items():
        out = out + apply_wirtinger(P, k, l).scale(c)
    return out


def bidegree_power_matrix(vectors, s, t):
    """Rows: coefficient vectors of (a_j . z)^s (conj(a_j . z))^t over the
    monomial pairs (k, l) with |k| = s, |l| = t (multinomial factors folded in)."""
    vectors = np.asarray(vectors, dtype=complex)
    d = vectors.shape[1]
    k_exps = _homogeneous_exponents(d, s)
    l_exps = _homogeneous_exponents(d, t)
    conj = np.conj(vectors)
    k_cols = np.empty((vectors.shape[0], len(k_exps)), dtype=complex)
    for col, k in enumerate(k_exps):
        vals = np.full(vectors.shape[0], complex(_multinomial(s, k)))
        for pos, e in enumerate(k):
            if e:
                vals *= vectors[:, pos] ** e
        k_cols[:, col] = vals
    l_cols = np.empty((vectors.shape[0], len(l_exps)), dtype=complex)
    for col, l in enumerate(l_exps):
        vals = np.full(vectors.shape[0], complex(_multinomial(t, l)))
        for pos, e in enumerate(l):
            if e:
                vals *= conj[:, pos] ** e
        l_cols[:, col] = vals
    rows = np.einsum("na,nb->nab", k_cols, l_cols)
    return rows.reshape(vectors.shape[0], -1), [(k, l) for k in k_exps for l in l_exps]


def _multinomial(total, exponents):
    out = math.factorial(total)
    for e in exponents:
        out //= math.factorial(e)
    return out


class ComplexDirectionSet:
    def __init__(self, d, s, t, vectors, condition_number=None):
        self.d = int(d)
        self.s = int(s)
        self.t = int(t)
        self.vectors = np.asarray(vectors, dtype=complex)
        self.vectors.setflags(write=False)
        self.condition_number = condition_number

    @property
    def count(self):
        return self.vectors.shape[0]


def _realified_lstsq(A, b):
    """Least-norm solve of complex A x = b through the doubled real system."""
    Ar, Ai = A.real, A.imag
    top = np.hstack([Ar, -Ai])
    bot = np.hstack([Ai, Ar])
    big = np.vstack([top, bot])
    rhs = np.concatenate([b.real, b.imag], axis=0)
    sol, *_ = np.linalg.lstsq(big, rhs, rcond=None)
    half = A.shape[1]
    return sol[:half] + 1j * sol[half:]


def sample_complex_directions(d, s, t, n, seed=0, tol=RANK_TOLERANCE,
                              max_retries=DEFAULT_RETRIES):
    """Random unit directions in C^d certified to span the bidegree-(s, t)
    homogeneous space."""
    required = dim_complex_bihomogeneous(d, s, t)
    if n < required:
        raise ValueError(f"need at least {required} directions, got {n}")
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        vectors = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
        lifted, _ = bidegree_power_matrix(vectors, s, t)
        svals = np.linalg.svd(lifted, compute_uv=False)
        rank = int(np.sum(svals > tol * svals[0])) if svals[0] > 0 else 0
        if rank == required:
            cond = float(svals[0] / svals[required - 1])
            return ComplexDirectionSet(d, s, t, vectors, condition_number=cond)
    raise SpanningError(f"no spanning complex directions (d={d}, s={s}, t={t})")


class ComplexRidgeDecomposition:
    """Represents z -> sum_j P_j(a_j . z) with univariate (w, conj w) profiles."""

    def __init__(self, d, vectors, profiles):
        self.d = int(d)
        self.vectors = np.asarray(vectors, dtype=complex)
        self.profiles = list(profiles)
        if self.vectors.shape[0] != len(self.profiles):
            raise ValueError("vector/profile count mismatch")

    @property
    def count(self):
        return len(self.profiles)

    def eval_many(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        out = np.zeros(points.shape[0], dtype=complex)
        for a, P in zip(self.vectors, self.profiles):
            out += P.eval_many((points @ a)[:, None])
        return out

    __call__ = eval_many

    def to_json_dict(self):
        return {
            "d": self.d,
            "blocks": [
                {
                    "alpha": [{"re": a.real, "im": a.imag} for a in vec],
                    "P": P.to_json_dict(),
                }
                for vec, P in zip(self.vectors, self.profiles)
            ],
        }

    @classmethod
    def from_json_dict(cls, obj):
        vectors = [
            [complex(a["re"], a["im"]) for a in block["alpha"]]
            for block in obj["blocks"]
        ]
        profiles = [ComplexBiPolynomial.from_json_dict(block["P"])
                    for block in obj["blocks"]]
        return cls(obj["d"], vectors, profiles)


def complex_sup_grid(d, count, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    pts /= norms
    pts *= rng.random((count, 1)) ** (1.0 / (2 * d))
    return pts


def complex_decompose(P, dirs, grid_size=512, residual_tol=1e-8):
    """Decompose P in P_s(C^d) along directions certified at bidegree (s, s).

    Directions spanning at (s, s) span every lower bidegree, so each component
    of P is solved independently by a least-norm fit in the power span.
    """
    s = dirs.s
    if dirs.t != s:
        raise ValueError("direction set must be certified at bidegree (s, s)")
    Pf = P.map_coefficients(complex)
    if Pf.holomorphic_degree() > s or Pf.antiholomorphic_degree() > s:
        raise ValueError("polynomial degrees exceed the certified bidegree")
    d = P.dim
    n = dirs.count

    components = {}
    for (k, l), c in Pf.terms.items():
        components.setdefault((sum(k), sum(l)), {})[(tuple(k), tuple(l))] = c

    profile_terms = [dict() for _ in range(n)]
    for (sp, tp), comp in sorted(components.items()):
        lifted, keys = bidegree_power_matrix(dirs.vectors, sp, tp)
        rhs = np.zeros(len(keys), dtype=complex)
        key_index = {key: i for i, key in enumerate(keys)}
        for key, c in comp.items():
            rhs[key_index[key]] = c
        coeffs = _realified_lstsq(lifted.T, rhs)
        for j in range(n):
            if coeffs[j] != 0:
                profile_terms[j][((sp,), (tp,))] = coeffs[j]

    profiles = [ComplexBiPolynomial(1, terms) for terms in profile_terms]
    decomp = ComplexRidgeDecomposition(d, dirs.vectors, profiles)

    grid = complex_sup_grid(d, grid_size)
    target = Pf.eval_many(grid)
    residual = float(np.max(np.abs(decomp.eval_many(grid) - target)))
    scale = 1.0 + float(np.max(np.abs(target)))
    if residual > residual_tol * scale:
        ranks = {}
        for (sp, tp) in components:
            lifted, _ = bidegree_power_matrix(dirs.vectors, sp, tp)
            svals = np.linalg.svd(lifted, compute_uv=False)
            ranks[(sp, tp)] = int(np.sum(svals > RANK_TOLERANCE * svals[0]))
        raise DecompositionError(
            f"complex ridge residual {residual:.3e}; per-bidegree ranks {ranks}")
    decomp.residual = residual
    return decomp


def realify(f):
    """Convert a real polynomial on R^(2d) (first d slots = real parts, last d
    = imaginary parts) into the equivalent polynomial in (z, conj z) on C^d.

    Substitutes x_j = (z_j + conj z_j)/2 and x_(d+j) = (z_j - conj z_j)/(2i);
    exact when f has int/Fraction coefficients.
    """
    if f.dim % 2 != 0:
        raise ValueError("ambient dimension must be even")
    d = f.dim // 2
    exact = all(isinstance(c, (int, Fraction)) for c in f.terms.values())
    half = Fraction(1, 2) if exact else 0.5
    zero = (0,) * d

    def base(j, imag_slot):
        e_j = tuple(1 if i == j else 0 for i in range(d))
        if not imag_slot:
            return ComplexBiPolynomial(d, {
                (e_j, zero): ExactComplex(half, 0) if exact else complex(half),
                (zero, e_j): ExactComplex(half, 0) if exact else complex(half),
            })
        factor = ExactComplex(0, -half) if exact else complex(0, -0.5)
        return ComplexBiPolynomial(d, {
            (e_j, zero): factor,
            (zero, e_j): -factor if exact else complex(0, 0.5),
        })

    bases = [base(j, False) for j in range(d)] + [base(j, True) for j in range(d)]
    one = ExactComplex(1, 0) if exact else complex(1.0)
    out = ComplexBiPolynomial.zero(d)
    for K, c in f.terms.items():
        coeff = (ExactComplex(Fraction(c), 0) if exact else complex(c))
        term = ComplexBiPolynomial.constant(d, coeff)
        for pos, e in enumerate(K):
            for _ in range(e):
                term = term * bases[pos]
        out = out + term
    return out
