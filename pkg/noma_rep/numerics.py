#   Copyright Peznauts <kevin@cloudnull.com>. All Rights Reserved.
#
#   Licensed under the Apache License, Version 2.0 (the "License"); you may
#   not use this file except in compliance with the License. You may obtain
#   a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#   WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#   License for the specific language governing permissions and limitations
#   under the License.

"""Special functions and quadrature primitives.

Nothing in here knows about NOMA; every analytic formula in the package is
built on these helpers.
"""

import dataclasses
import math
import sys

import numpy as np

from scipy import integrate
from scipy import special

from noma_rep import DomainError


GAUSSIAN_WEIGHT = "gaussian-weight"
FINITE_INTERVAL = "finite-interval"

_EPS = sys.float_info.epsilon
_TINY = sys.float_info.min / _EPS
_GAMMA_ACCURACY = 1.0e-15
_GAMMA_MAX_ITERATION = 10000

# Terms more than ln(1e18) below the running max are dropped from sums.
LOG_SUM_FLOOR = math.log(1.0e18)


@dataclasses.dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a quadrature rule.

    For the gaussian-weight kind the weights already carry the standard
    normal density, so a rule integrates f as sum(w * f(x)).
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise DomainError("Quadrature nodes and weights differ in length")
        if np.any(self.weights <= 0):
            raise DomainError("Quadrature weights must be positive")
        if self.kind not in (GAUSSIAN_WEIGHT, FINITE_INTERVAL):
            raise DomainError("Unknown quadrature kind [ %s ]" % self.kind)

    def integrate(self, f):
        """Apply the rule to a scalar function.

        :param f: Callable returning a real for a real argument.
        :type f: Object
        :returns: Float
        """

        values = np.fromiter(
            (f(float(x)) for x in self.nodes),
            dtype=float,
            count=len(self.nodes),
        )
        return float(np.dot(self.weights, values))


def regularized_lower_gamma(a, x):
    """Return P(a, x), the regularized lower incomplete gamma function.

    The power series is used for x < a + 1 and Lentz's continued fraction
    for the upper function otherwise.

    :param a: Shape, a > 0.
    :type a: Float
    :param x: Upper integration limit, x >= 0.
    :type x: Float
    :returns: Float
    """

    if not a > 0:
        raise DomainError("regularized_lower_gamma needs a > 0, got %r" % a)
    if not x >= 0:
        raise DomainError("regularized_lower_gamma needs x >= 0, got %r" % x)
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0

    if x < a + 1.0:
        value = _gamma_series(a, x)
    else:
        value = 1.0 - _gamma_continued_fraction(a, x)

    return min(1.0, max(0.0, value))


def _gamma_prefactor(a, x):
    return math.exp(-x + a * math.log(x) - log_gamma(a))


def _gamma_series(a, x):
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_GAMMA_MAX_ITERATION):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_ACCURACY:
            break

    return total * _gamma_prefactor(a, x)


def _gamma_continued_fraction(a, x):
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITERATION):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_ACCURACY:
            break

    return h * _gamma_prefactor(a, x)


def q_function(x):
    """Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt(2)).

    Accepts scalars or arrays.
    """

    return 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def q_inverse(p):
    """Inverse of q_function for p in (0, 1).

    :param p: Tail probability.
    :type p: Float
    :returns: Float
    """

    p_arr = np.asarray(p, dtype=float)
    if np.any(~((p_arr > 0) & (p_arr < 1))):
        raise DomainError("q_inverse needs p in (0, 1), got %r" % (p,))

    return -special.ndtri(p_arr)


def log_gamma(a):
    """Natural log of the gamma function for a > 0."""

    if not a > 0:
        raise DomainError("log_gamma needs a > 0, got %r" % a)

    return float(special.gammaln(a))


def log_binomial(top, bottom):
    """Log of the generalized binomial coefficient C(top, bottom).

    Non-integer arguments go through the gamma function, which is how
    binomials with a half-integer M*N are evaluated.

    :param top: Upper argument, top > 0.
    :type top: Float
    :param bottom: Lower argument, 0 <= bottom <= top.
    :type bottom: Float
    :returns: Float
    """

    if not top > 0 or not bottom >= 0:
        raise DomainError(
            "log_binomial needs top > 0 and bottom >= 0, got (%r, %r)"
            % (top, bottom)
        )
    if bottom > top:
        raise DomainError(
            "log_binomial needs top >= bottom, got (%r, %r)" % (top, bottom)
        )

    return (
        log_gamma(top + 1.0)
        - log_gamma(bottom + 1.0)
        - log_gamma(top - bottom + 1.0)
    )


def log_sum_exp(log_terms, floor=LOG_SUM_FLOOR):
    """Stable log(sum(exp(log_terms))).

    Terms more than `floor` below the largest one are dropped.

    :param log_terms: Logarithms of nonnegative summands.
    :type log_terms: List
    :param floor: Truncation depth in nats.
    :type floor: Float
    :returns: Float
    """

    values = np.asarray(log_terms, dtype=float)
    if values.size == 0:
        return -math.inf

    peak = np.max(values)
    if np.isinf(peak):
        return float(peak)

    kept = values[values >= peak - floor]
    return float(special.logsumexp(kept))


def binary_entropy(p):
    """Binary entropy H(p) in bits, with H(0) = H(1) = 0."""

    if not 0 <= p <= 1:
        raise DomainError("binary_entropy needs p in [0, 1], got %r" % p)
    if p in (0, 1):
        return 0.0

    return float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))


def gaussian_rule(rule_size):
    """Gauss-Hermite rule rescaled to the standard normal weight.

    Physicists' nodes t are mapped to x = sqrt(2) t and the weights are
    divided by sqrt(pi); nodes whose weights underflow to zero are dropped.

    :param rule_size: Number of Hermite nodes.
    :type rule_size: Integer
    :returns: Object
    """

    if rule_size < 1:
        raise DomainError("rule_size must be positive, got %r" % rule_size)

    nodes, weights = np.polynomial.hermite.hermgauss(int(rule_size))
    weights = weights / math.sqrt(math.pi)
    keep = weights > 0
    return QuadratureRule(
        nodes=nodes[keep] * math.sqrt(2.0),
        weights=weights[keep],
        kind=GAUSSIAN_WEIGHT,
    )


def finite_interval_rule(rule_size, lo, hi, panels=1):
    """Composite Gauss-Legendre rule on [lo, hi].

    :param rule_size: Nodes per panel.
    :type rule_size: Integer
    :param lo: Lower limit.
    :type lo: Float
    :param hi: Upper limit.
    :type hi: Float
    :param panels: Number of equal-width panels.
    :type panels: Integer
    :returns: Object
    """

    if not hi > lo:
        raise DomainError("Empty interval [%r, %r]" % (lo, hi))

    base_nodes, base_weights = np.polynomial.legendre.leggauss(int(rule_size))
    edges = np.linspace(lo, hi, int(panels) + 1)
    nodes = list()
    weights = list()
    for left, right in zip(edges[:-1], edges[1:]):
        half = 0.5 * (right - left)
        nodes.append(left + half * (base_nodes + 1.0))
        weights.append(half * base_weights)

    return QuadratureRule(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        kind=FINITE_INTERVAL,
    )


def integrate_gaussian(f, rule_size=96, verify=False):
    """Return the expectation of f(X) for X standard normal.

    The default path applies a Gauss-Hermite rule. With `verify` set the
    integral of f times the normal density is computed by adaptive
    quadrature over [-10, 10] instead, which copes with discontinuous f.

    :param f: Bounded scalar function.
    :type f: Object
    :param rule_size: Gauss-Hermite node count.
    :type rule_size: Integer
    :param verify: Use the adaptive finite-interval path.
    :type verify: Boolean
    :returns: Float
    """

    if verify:
        value, _ = integrate.quad(
            lambda x: f(x) * math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi),
            -10.0,
            10.0,
            points=[0.0],
            limit=500,
            epsabs=1.0e-13,
        )
        return float(value)

    return gaussian_rule(rule_size).integrate(f)
