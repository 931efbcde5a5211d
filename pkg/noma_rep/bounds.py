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

import dataclasses
import math

from scipy import special

from noma_rep import ConditionViolatedError
from noma_rep import DomainError
from noma_rep import numerics


@dataclasses.dataclass(frozen=True)
class BoundInputs:
    """Parameter tuple consumed by every closed-form expression.

    N, c_D and d are derived on access so they can never go stale.
    """

    copies: int
    interferers: int
    threshold: float
    snr: float

    def __post_init__(self):
        if self.copies < 1:
            raise DomainError("D must be >= 1, got %r" % self.copies)
        if self.interferers < 0:
            raise DomainError("M must be >= 0, got %r" % self.interferers)
        if not (self.threshold > 0 and math.isfinite(self.threshold)):
            raise DomainError("T must be positive, got %r" % self.threshold)
        if not self.snr > 0:
            raise DomainError("snr must be positive, got %r" % self.snr)

    @property
    def dof(self):
        """Moment matched N = (D + 1) / 2."""

        return (self.copies + 1) / 2.0

    @property
    def c_d(self):
        """Correction constant c_D of the left-tail bound."""

        return correction_c(self.copies)

    @property
    def d(self):
        """Margin D / (c_D T) - 1 / snr; the bound applies when positive."""

        return self.copies / (self.c_d * self.threshold) - 1.0 / self.snr

    @property
    def shape(self):
        """M * N, the shape of the Gamma law of chi^2_{2NM} / 2."""

        return self.interferers * self.dof


@dataclasses.dataclass(frozen=True)
class BoundResult:
    """Outcome of the closed-form outage bound at one parameter point.

    psi, residual and total are None when d <= 0; nu and c_const are None
    whenever the diversity condition could not be evaluated.
    `tail_ok` is set when d >= M, where the residual term really bounds
    the interference tail.
    """

    inputs: BoundInputs
    psi: float = None
    residual: float = None
    total: float = None
    valid: bool = False
    floor: float = None
    nu: float = None
    c_const: float = None
    diversity_ok: bool = False
    tail_ok: bool = False


@dataclasses.dataclass(frozen=True)
class DiversityCheck:
    nu: float
    c_const: float
    holds: bool
    lhs: float
    rhs: float


def _inputs(copies, interferers, threshold, snr):
    return BoundInputs(
        copies=int(copies),
        interferers=int(interferers),
        threshold=float(threshold),
        snr=float(snr),
    )


def correction_c(copies):
    """Return c_D = D e^-1 (D!)^(-1/D), evaluated in the log domain.

    :param copies: Number of copies D >= 1.
    :type copies: Integer
    :returns: Float
    """

    if copies < 1:
        raise DomainError("D must be >= 1, got %r" % copies)

    return math.exp(
        math.log(copies) - 1.0 - numerics.log_gamma(copies + 1.0) / copies
    )


def zd_cdf(copies, z):
    """Pr(Z_D < z) for Z_D = chi^2_{2D} / (2D)."""

    return numerics.regularized_lower_gamma(copies, copies * z)


def chernoff_plain_left(copies, z):
    """Uncorrected Chernoff bound (z e^(1-z))^D on Pr(Z_D < z), z in [0,1)."""

    if not 0 <= z < 1:
        return None
    if z == 0:
        return 0.0

    return math.exp(copies * (math.log(z) + 1.0 - z))


def chernoff_cdf_bounds(copies, z):
    """Return (left, right) Chernoff-type bounds at z.

    left is F_D(z) = (z c_D e^(1 - z c_D))^D on [0, 1/c_D], an upper bound
    on Pr(Z_D <= z). right is (z e^(1-z))^D on Pr(Z_D > z) for z > 1. A
    bound outside its range is None.

    :param copies: D.
    :type copies: Integer
    :param z: Evaluation point, z >= 0.
    :type z: Float
    :returns: Tuple
    """

    if z < 0:
        raise DomainError("z must be >= 0, got %r" % z)

    c_d = correction_c(copies)
    left = None
    if z == 0:
        left = 0.0
    elif z * c_d <= 1.0:
        zc = z * c_d
        left = math.exp(copies * (math.log(zc) + 1.0 - zc))

    right = None
    if z > 1:
        right = math.exp(copies * (math.log(z) + 1.0 - z))

    return left, right


def outage_exact_m0(copies, threshold, snr):
    """Exact outage without interference, P(D, T / snr)."""

    inputs = _inputs(copies, 0, threshold, snr)
    return numerics.regularized_lower_gamma(
        inputs.copies, inputs.threshold / inputs.snr
    )


def outage_bound_m0(copies, threshold, snr):
    """Corrected upper bound (1/D!) (T/snr)^D exp(-c_D T / snr)."""

    inputs = _inputs(copies, 0, threshold, snr)
    ratio = inputs.threshold / inputs.snr
    return math.exp(
        inputs.copies * math.log(ratio)
        - numerics.log_gamma(inputs.copies + 1.0)
        - inputs.c_d * ratio
    )


def outage_bound_m0_loose(copies, threshold, snr):
    """The looser (1/D!) (T/snr)^D bound, without the correction term."""

    inputs = _inputs(copies, 0, threshold, snr)
    return math.exp(
        inputs.copies * math.log(inputs.threshold / inputs.snr)
        - numerics.log_gamma(inputs.copies + 1.0)
    )


def _require_interference(inputs):
    if inputs.interferers < 1:
        raise DomainError(
            "M must be >= 1 here; use outage_exact_m0 for M = 0"
        )


def _log_psi_prefactor(inputs):
    big_d = inputs.copies
    c_t = inputs.c_d * inputs.threshold
    return (
        big_d * math.log(inputs.threshold / inputs.snr)
        - numerics.log_gamma(big_d + 1.0)
        - c_t / inputs.snr
        - inputs.shape * math.log1p(c_t / inputs.dof)
    )


def psi(copies, interferers, threshold, snr):
    """Leading term of the closed-form outage bound.

    The rising factorial prod_{t<n}(MN + t) is Gamma(MN + n) / Gamma(MN),
    so half-integer MN needs no special casing. The sum over n is
    accumulated with log-sum-exp.

    :param copies: D.
    :type copies: Integer
    :param interferers: M >= 1.
    :type interferers: Integer
    :param threshold: T.
    :type threshold: Float
    :param snr: Linear SNR.
    :type snr: Float
    :returns: Float
    """

    inputs = _inputs(copies, interferers, threshold, snr)
    _require_interference(inputs)

    big_d = inputs.copies
    shape = inputs.shape
    log_ratio = math.log(inputs.snr) - math.log(
        inputs.dof + inputs.c_d * inputs.threshold
    )
    log_shape_gamma = numerics.log_gamma(shape)
    terms = [
        numerics.log_binomial(big_d, n)
        + n * log_ratio
        + numerics.log_gamma(shape + n)
        - log_shape_gamma
        for n in range(big_d + 1)
    ]
    return math.exp(_log_psi_prefactor(inputs) + numerics.log_sum_exp(terms))


def residual_term(copies, interferers, threshold, snr):
    """Second term (d e / M)^(MN) e^(-N d) of the outage bound.

    :raises ConditionViolatedError: when d <= 0.
    :returns: Float
    """

    inputs = _inputs(copies, interferers, threshold, snr)
    _require_interference(inputs)

    d = inputs.d
    if not d > 0:
        raise ConditionViolatedError(
            "d = %.6g <= 0, the bound does not apply at D=%s T=%s snr=%s"
            % (d, inputs.copies, inputs.threshold, inputs.snr)
        )

    return math.exp(
        inputs.shape * (math.log(d) + 1.0 - math.log(inputs.interferers))
        - inputs.dof * d
    )


def psi_asymptotic(copies, interferers, threshold):
    """High-SNR floor of psi.

    C(MN + D - 1, MN - 1) (N / (N + c_D T))^MN (T / (N + c_D T))^D.
    """

    inputs = _inputs(copies, interferers, threshold, 1.0)
    _require_interference(inputs)

    shape = inputs.shape
    denominator = inputs.dof + inputs.c_d * inputs.threshold
    return math.exp(
        numerics.log_binomial(shape + inputs.copies - 1.0, shape - 1.0)
        + shape * (math.log(inputs.dof) - math.log(denominator))
        + inputs.copies
        * (math.log(inputs.threshold) - math.log(denominator))
    )


def psi_floor_entropy_bound(copies, interferers, threshold):
    """Entropy bound on the floor using C(n, m) <= 2^(n H(m / n))."""

    inputs = _inputs(copies, interferers, threshold, 1.0)
    _require_interference(inputs)

    shape = inputs.shape
    rho_tn = inputs.threshold / inputs.dof
    c_rho = 1.0 + inputs.c_d * rho_tn
    top = shape + inputs.copies - 1.0
    return math.exp(
        math.log(2.0) * top * numerics.binary_entropy((shape - 1.0) / top)
        + inputs.copies * (math.log(rho_tn) - math.log(c_rho))
        - shape * math.log(c_rho)
    )


def psi_floor_exponent(interferers, rho_tn):
    """Large-D per-copy exponent of log2 of the floor, with c_D -> 1.

    (1 + M/2)(H(M / (M + 2)) - log2(1 + rho)) + log2(rho)
    """

    if interferers < 1 or not rho_tn > 0:
        raise DomainError("Needs M >= 1 and rho > 0")

    m = interferers
    return (1.0 + m / 2.0) * (
        numerics.binary_entropy(m / (m + 2.0)) - math.log2(1.0 + rho_tn)
    ) + math.log2(rho_tn)


def exponential_decay_condition(interferers, rho_tn):
    """True when the floor decays exponentially in D (negative exponent)."""

    m = interferers
    return numerics.binary_entropy(m / (m + 2.0)) < math.log2(
        1.0 + rho_tn
    ) - math.log2(rho_tn) / (1.0 + m / 2.0)


def psi_amgm_bound(copies, interferers, threshold, snr):
    """Bound on psi with the rising factorial replaced by its AM-GM cap.

    prod_{t<n}(MN + t) <= (MN + (D-1)/2)^n for n <= D, after which the
    binomial sum collapses to (1 + s (MN + (D-1)/2))^D.
    """

    inputs = _inputs(copies, interferers, threshold, snr)
    _require_interference(inputs)

    s = inputs.snr / (inputs.dof + inputs.c_d * inputs.threshold)
    mean_factor = inputs.shape + (inputs.copies - 1) / 2.0
    return math.exp(
        _log_psi_prefactor(inputs)
        + inputs.copies * math.log1p(s * mean_factor)
    )


def diversity_condition(copies, interferers, threshold, snr):
    """Evaluate nu, the constant C and the nu < 1 condition.

    :raises ConditionViolatedError: when d <= 0.
    :returns: Object
    """

    inputs = _inputs(copies, interferers, threshold, snr)
    _require_interference(inputs)

    d = inputs.d
    if not d > 0:
        raise ConditionViolatedError(
            "d = %.6g <= 0, diversity condition undefined" % d
        )

    big_d = inputs.copies
    m = inputs.interferers
    t = inputs.threshold
    snr = inputs.snr
    c_t = inputs.c_d * t
    spread = snr * (big_d * (m + 1) + m - 1) / (big_d + 1 + 2.0 * c_t)
    nu = (t / snr) * (1.0 + 2.0 * c_t / (big_d + 1)) ** (-m / 2.0) * (
        1.0 + spread
    )
    c_const = (1.0 + snr / (d * snr + 1.0)) ** (-m / 2.0)
    lhs = (snr / t) * ((big_d + 1) / (big_d + 1 + 2.0 * c_t)) ** (m / 2.0)
    rhs = 1.0 + spread
    return DiversityCheck(
        nu=nu, c_const=c_const, holds=lhs >= rhs, lhs=lhs, rhs=rhs
    )


def diversity_envelope(copies, interferers, threshold, snr):
    """Return (C / D!) nu^D, an upper bound on psi when d > 0."""

    check = diversity_condition(copies, interferers, threshold, snr)
    return math.exp(
        math.log(check.c_const)
        + copies * math.log(check.nu)
        - numerics.log_gamma(copies + 1.0)
    )


def outage_bound(copies, interferers, threshold, snr):
    """Closed-form upper bound psi + residual on the approximated outage.

    Invalidity (d <= 0) is reported through `valid`, never raised.

    :returns: Object
    """

    inputs = _inputs(copies, interferers, threshold, snr)
    _require_interference(inputs)

    floor = psi_asymptotic(copies, interferers, threshold)
    if not inputs.d > 0:
        return BoundResult(inputs=inputs, valid=False, floor=floor)

    value = psi(copies, interferers, threshold, snr)
    residual = residual_term(copies, interferers, threshold, snr)
    check = diversity_condition(copies, interferers, threshold, snr)
    return BoundResult(
        inputs=inputs,
        psi=value,
        residual=residual,
        total=value + residual,
        valid=True,
        floor=floor,
        nu=check.nu,
        c_const=check.c_const,
        diversity_ok=check.holds,
        tail_ok=inputs.d >= inputs.interferers,
    )


def outage_upper(copies, interferers, threshold, snr):
    """Outage probability upper bound clamped to [0, 1].

    M = 0 uses the exact chi-squared cdf; otherwise psi + residual, or 1
    where the bound does not apply. When d < M the residual term is
    replaced by the exact tail Pr(Y >= N d).
    """

    if interferers == 0:
        return outage_exact_m0(copies, threshold, snr)

    result = outage_bound(copies, interferers, threshold, snr)
    if not result.valid:
        return 1.0
    if not result.tail_ok:
        tail = tail_term(copies, interferers, threshold, snr)
        return min(1.0, result.psi + tail)

    return min(1.0, result.total)


def tail_term(copies, interferers, threshold, snr):
    """Exact Pr(Y >= N d) for Y ~ Gamma(MN, 1).

    :raises ConditionViolatedError: when d <= 0.
    :returns: Float
    """

    inputs = _inputs(copies, interferers, threshold, snr)
    _require_interference(inputs)
    if not inputs.d > 0:
        raise ConditionViolatedError("d = %.6g <= 0" % inputs.d)

    return float(special.gammaincc(inputs.shape, inputs.dof * inputs.d))


def omega_outage_exact(
    copies, interferers, threshold, snr, rule_size=64, panels=16
):
    """Approximated outage computed by quadrature instead of bounded.

    With Y ~ Gamma(MN, 1) the outage is E[P(D, T (Y/N + 1/snr))]. The
    expectation is taken with a composite Gauss-Legendre rule between the
    1e-18 quantiles of Y.

    :returns: Float
    """

    inputs = _inputs(copies, interferers, threshold, snr)
    _require_interference(inputs)

    shape = inputs.shape
    lo = float(special.gammaincinv(shape, 1.0e-18))
    hi = float(special.gammainccinv(shape, 1.0e-18))
    rule = numerics.finite_interval_rule(rule_size, lo, hi, panels=panels)
    log_norm = numerics.log_gamma(shape)

    def integrand(y):
        if y <= 0:
            return 0.0
        density = math.exp((shape - 1.0) * math.log(y) - y - log_norm)
        return density * numerics.regularized_lower_gamma(
            inputs.copies,
            inputs.threshold * (y / inputs.dof + 1.0 / inputs.snr),
        )

    return min(1.0, max(0.0, rule.integrate(integrand)))


def max_interferers(copies, threshold):
    """Largest M with M <= 2 log2(D / (4T)).

    :raises DomainError: when D / (4T) < 1, no interferers are supportable.
    """

    ratio = copies / (4.0 * threshold)
    if ratio < 1.0 - 1e-12:
        raise DomainError(
            "No interferers supportable: D / (4T) = %.6g < 1" % ratio
        )
    if ratio <= 1.0:
        return 0

    return int(math.floor(2.0 * math.log2(ratio) + 1e-12))


def copies_needed(interferers, threshold):
    """Smallest integer D with D >= 4 T 2^(M/2)."""

    if interferers < 0 or not threshold > 0:
        raise DomainError("Needs M >= 0 and T > 0")

    return int(math.ceil(4.0 * threshold * 2 ** (interferers / 2.0) - 1e-9))


def sufficient_condition(copies, interferers, threshold):
    """2^(1 + M/2) < (D + 1) / (2T)."""

    return 2 ** (1.0 + interferers / 2.0) < (copies + 1) / (2.0 * threshold)


def design_rules(copies=None, interferers=None, threshold=None):
    """Answer the design-rule queries that the given arguments allow.

    Returns a dictionary with any of `max_interferers`, `copies_needed`,
    `sufficient_condition`, `rule_satisfied` and `exponential_decay`.
    """

    if threshold is None:
        raise DomainError("Design rules need a threshold T")

    answers = dict()
    if copies is not None:
        try:
            answers["max_interferers"] = max_interferers(copies, threshold)
        except DomainError:
            answers["max_interferers"] = None

    if interferers is not None:
        answers["copies_needed"] = copies_needed(interferers, threshold)

    if copies is not None and interferers is not None:
        answers["sufficient_condition"] = sufficient_condition(
            copies, interferers, threshold
        )
        supported = answers["max_interferers"]
        answers["rule_satisfied"] = (
            supported is not None and interferers <= supported
        )
        if interferers >= 1:
            answers["exponential_decay"] = exponential_decay_condition(
                interferers, threshold / ((copies + 1) / 2.0)
            )

    return answers
