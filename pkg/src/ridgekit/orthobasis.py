"""Graded orthonormal polynomial basis on the unit ball.

Monomials in graded lexicographic order are orthonormalized by modified
Gram-Schmidt with one re-orthogonalization pass, carried out on weighted
node-value vectors of a polynomial-exact quadrature rule while tracking the
monomial coefficients of each basis element.
"""

import hashlib
import math

import numpy as np

from .polycore import MultiIndexPolynomial, dim_homogeneous, monomials_up_to
from .quadrature import evaluate_on_nodes


class ConditioningError(RuntimeError):
    """Raised when orthogonalization hits a numerically dependent monomial."""


def monomial_values(exponents, points):
    """Matrix of monomial values: rows follow `exponents`, columns `points`.

    Uses the graded recurrence x^k = x^(k - e_j) * x_j so each row costs one
    elementwise multiply.
    """
    points = np.asarray(points, dtype=float)
    index = {k: i for i, k in enumerate(exponents)}
    values = np.empty((len(exponents), points.shape[0]))
    for i, k in enumerate(exponents):
        if sum(k) == 0:
            values[i] = 1.0
            continue
        j = next(pos for pos, e in enumerate(k) if e > 0)
        parent = list(k)
        parent[j] -= 1
        values[i] = values[index[tuple(parent)]] * points[:, j]
    return values


class OrthoBasis:
    """Orthonormal basis of P_{max_degree}(B^dim) under the ball inner product."""

    def __init__(self, dim, max_degree, exponents, coeff_matrix, node_values, rule):
        self.dim = dim
        self.max_degree = max_degree
        self.exponents = list(exponents)
        self.coeff_matrix = coeff_matrix            # rows: basis elements over monomials
        self.node_values = node_values              # rows: basis values at rule nodes
        self.rule = rule
        self.degrees = [sum(k) for k in exponents]  # grlex: degree of element i
        self._polys = None

    @property
    def size(self):
        return len(self.exponents)

    @property
    def polys(self):
        if self._polys is None:
            self._polys = [
                MultiIndexPolynomial(self.dim, {
                    k: c for k, c in zip(self.exponents, row) if c != 0.0
                })
                for row in self.coeff_matrix
            ]
        return self._polys

    def index_set(self, s):
        """I_s: indices of basis elements with degree <= s."""
        count = math.comb(min(s, self.max_degree) + self.dim, self.dim)
        return list(range(count))

    def graded_block(self, s):
        """J_s: indices of basis elements with degree exactly s."""
        if s > self.max_degree:
            return []
        lo = math.comb(s - 1 + self.dim, self.dim) if s > 0 else 0
        hi = math.comb(s + self.dim, self.dim)
        return list(range(lo, hi))

    def combine(self, coefficients, indices=None):
        """Polynomial sum_i coefficients[i] * P_{indices[i]}."""
        coefficients = np.asarray(coefficients, dtype=float)
        rows = self.coeff_matrix if indices is None else self.coeff_matrix[list(indices)]
        mono = coefficients @ rows
        return MultiIndexPolynomial(self.dim, {
            k: c for k, c in zip(self.exponents, mono) if c != 0.0
        })

    def gram_matrix(self):
        weighted = self.node_values * self.rule.weights
        return weighted @ self.node_values.T

    def rule_digest(self):
        h = hashlib.sha256()
        h.update(self.rule.nodes.tobytes())
        h.update(self.rule.weights.tobytes())
        return h.hexdigest()[:16]

    def to_json_dict(self):
        return {
            "dim": self.dim,
            "s_max": self.max_degree,
            "rule_digest": self.rule_digest(),
            "polys": [p.to_json_dict() for p in self.polys],
        }


def build_basis(d, s_max, rule, order="grlex"):
    """Orthonormalize the monomials of degree <= s_max on B^d.

    `order` selects the monomial enumeration ("grlex" or "grlex_reversed",
    which reverses ties within each degree); any degree-graded order yields
    the same spans and the same quasi-projection operators.
    """
    if rule.domain != "ball" or rule.dim != d:
        raise ValueError("rule must be a ball rule in the same dimension")
    if rule.exactness_degree < 2 * s_max:
        raise ValueError(
            f"rule exactness {rule.exactness_degree} insufficient for degree {s_max}")
    exponents = monomials_up_to(d, s_max)
    if order == "grlex":
        pass
    elif order == "grlex_reversed":
        reordered = []
        for s in range(s_max + 1):
            block = [k for k in exponents if sum(k) == s]
            reordered.extend(reversed(block))
        exponents = reordered
    else:
        raise ValueError(f"unknown order {order!r}")

    values = monomial_values(exponents, rule.nodes)
    sqrt_w = np.sqrt(rule.weights)
    vectors = values * sqrt_w  # rows live in the weighted L2 geometry
    n = len(exponents)
    q_rows = np.zeros_like(vectors)
    coeffs = np.zeros((n, n))
    for i in range(n):
        v = vectors[i].copy()
        c = np.zeros(n)
        c[i] = 1.0
        initial_norm = np.linalg.norm(v)
        for _ in range(2):  # modified GS + one re-orthogonalization pass
            if i:
                proj = q_rows[:i] @ v
                v -= proj @ q_rows[:i]
                c -= proj @ coeffs[:i]
        norm = np.linalg.norm(v)
        if norm < 1e-12 * max(1.0, initial_norm):
            raise ConditioningError(
                f"monomial {exponents[i]} is numerically dependent (residual {norm:.2e})")
        q_rows[i] = v / norm
        coeffs[i] = c / norm
    node_values = coeffs @ values
    basis = OrthoBasis(d, s_max, exponents, coeffs, node_values, rule)
    return basis


def project_coefficients(f, basis, s):
    """Inner products <f, P_i> for i in I_s, by quadrature."""
    if s > basis.max_degree:
        raise ValueError(f"basis covers degree {basis.max_degree}, requested {s}")
    fv = evaluate_on_nodes(f, basis.rule)
    idx = basis.index_set(s)
    return (basis.node_values[idx] * basis.rule.weights) @ fv
