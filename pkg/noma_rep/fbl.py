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

import numpy as np

from noma_rep import bounds
from noma_rep import DomainError
from noma_rep import EmptySampleError
from noma_rep import InfeasibleError
from noma_rep import logger
from noma_rep import meta
from noma_rep import numerics


EXACT_V = "exact-V"
VBAR_MODE = "vbar"
DISPERSION_MODES = (EXACT_V, VBAR_MODE)

# Supremum of the channel dispersion, 1 / (ln 2)^2 = (log2 e)^2.
VBAR = 1.0 / math.log(2.0) ** 2

QUADRATURE_WARN = 1.0e-6


@dataclasses.dataclass(frozen=True)
class FblConfig:
    n: int
    rate: float
    dispersion_mode: str = EXACT_V
    nodes: int = meta.__quadrature_nodes__

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("Codeword length n must be >= 2")
        if not self.rate > 0:
            raise DomainError("Rate must be positive")
        if self.dispersion_mode not in DISPERSION_MODES:
            raise DomainError(
                "Unknown dispersion mode [ %s ]" % self.dispersion_mode
            )
        if self.nodes < 1:
            raise DomainError("Quadrature nodes must be positive")


@dataclasses.dataclass(frozen=True)
class ErrorEstimate:
    """Monte Carlo mean error probability with a 95% normal interval."""

    mean: float
    stderr: float
    ci95: tuple
    trials: int

    @property
    def halfwidth(self):
        """Half width of the 95% interval."""

        return 0.5 * (self.ci95[1] - self.ci95[0])


def dispersion(gamma):
    """Channel dispersion V(gamma) = gamma (2 + gamma) / (1 + gamma)^2 VBAR."""

    values = np.asarray(gamma, dtype=float)
    if np.any(values < 0):
        raise DomainError("Dispersion needs gamma >= 0")

    result = values * (2.0 + values) / (1.0 + values) ** 2 * VBAR
    return float(result) if result.ndim == 0 else result


def _dispersion_for(gamma, mode):
    if mode == VBAR_MODE:
        return np.full_like(np.asarray(gamma, dtype=float), VBAR)
    if mode == EXACT_V:
        return np.asarray(dispersion(gamma), dtype=float)

    raise DomainError("Unknown dispersion mode [ %s ]" % mode)


def rate_normal_approx(n, epsilon, gamma, mode=EXACT_V):
    """Normal approximation of the achievable rate, O(log n / n) dropped.

    With mode="vbar" the dispersion is replaced by its supremum, giving the
    lower bound on the rate.

    :param n: Codeword length.
    :type n: Integer
    :param epsilon: Target error probability in (0, 1).
    :type epsilon: Float
    :param gamma: SINR.
    :type gamma: Float
    :param mode: Dispersion mode.
    :type mode: String
    :returns: Float
    """

    if n < 1:
        raise DomainError("n must be >= 1")

    penalty = math.sqrt(float(_dispersion_for(gamma, mode)) / n)
    return math.log2(1.0 + gamma) - penalty * float(
        numerics.q_inverse(epsilon)
    )


def pointwise_error(gamma, rate, n, mode=EXACT_V):
    """Q(sqrt(n / V(gamma)) (log2(1 + gamma) - R)) for each gamma.

    A zero SINR carries no information and is an error with probability 1.
    """

    gamma = np.asarray(gamma, dtype=float)
    variance = _dispersion_for(gamma, mode)
    margin = np.log2(1.0 + gamma) - rate
    with np.errstate(divide="ignore", invalid="ignore"):
        argument = np.sqrt(n / variance) * margin
    argument = np.where(variance > 0, argument, -np.inf)
    return numerics.q_function(argument)


def threshold_at(x, rate, n):
    """SINR threshold 2^(sqrt(VBAR / n) x + R) - 1 of the error integral."""

    return 2.0 ** (math.sqrt(VBAR / n) * x + rate) - 1.0


def avg_error_upper(
    copies, interferers, rate, n, snr, rule_size=None, verify=False
):
    """Upper bound on the average error probability of a length-n code.

    The outage bound (exact cdf when M = 0) is integrated against the
    standard normal over the rate perturbation. Where the bound does not
    apply the integrand is 1, and a nonpositive threshold gives 0.

    :param copies: D.
    :type copies: Integer
    :param interferers: M.
    :type interferers: Integer
    :param rate: Code rate R in bits per channel use.
    :type rate: Float
    :param n: Codeword length.
    :type n: Integer
    :param snr: Linear SNR.
    :type snr: Float
    :param rule_size: Gauss-Hermite nodes.
    :type rule_size: Integer
    :param verify: Use adaptive quadrature instead.
    :type verify: Boolean
    :returns: Float
    """

    if interferers < 0:
        raise DomainError("M must be >= 0")
    if not rate > 0:
        raise DomainError("Rate must be positive")

    def inner(x):
        threshold = threshold_at(x, rate, n)
        if threshold <= 0:
            return 0.0
        return bounds.outage_upper(copies, interferers, threshold, snr)

    value = numerics.integrate_gaussian(
        inner, rule_size=rule_size or meta.__quadrature_nodes__, verify=verify
    )
    return min(1.0, max(0.0, value))


def quadrature_discrepancy(copies, interferers, rate, n, snr, nodes=None):
    """Compare the default rule with a rule ten times finer.

    Logs a warning when the two disagree by more than 1e-6.

    :returns: Float
    """

    nodes = nodes or meta.__quadrature_nodes__
    coarse = avg_error_upper(copies, interferers, rate, n, snr, nodes)
    fine = avg_error_upper(copies, interferers, rate, n, snr, nodes * 10)
    gap = abs(coarse - fine)
    if gap > QUADRATURE_WARN:
        log = logger.getLogger(name="noma_rep")
        log.warning(
            "Quadrature [ %s ] vs [ %s ] nodes differ by [ %.3g ] at"
            " D=%s M=%s R=%s n=%s",
            nodes,
            nodes * 10,
            gap,
            copies,
            interferers,
            rate,
            n,
        )

    return gap


def max_rate_for_error(
    copies, interferers, n, snr, eps_target, lo=1.0e-4, hi=16.0, tol=1.0e-6
):
    """Largest rate whose average error bound stays at or below a target.

    :raises InfeasibleError: when even the smallest rate misses the target.
    :returns: Float
    """

    if not 0 < eps_target < 1:
        raise DomainError("Target error must be in (0, 1)")

    def error(rate):
        return avg_error_upper(copies, interferers, rate, n, snr)

    if error(lo) > eps_target:
        raise InfeasibleError(
            "Target %.3g is out of reach for D=%s M=%s n=%s snr=%.4g"
            % (eps_target, copies, interferers, n, snr)
        )
    if error(hi) <= eps_target:
        return hi

    while hi - lo > tol * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if error(mid) <= eps_target:
            lo = mid
        else:
            hi = mid

    return lo


def avg_error_mc(samples, rate, n, dispersion_mode=EXACT_V):
    """Sample mean of the pointwise error over Monte Carlo SINR draws.

    :param samples: Object with a `values` array of SINR draws.
    :type samples: Object
    :returns: Object
    """

    values = np.asarray(samples.values, dtype=float)
    if values.size == 0:
        raise EmptySampleError("No SINR samples to average")

    errors = pointwise_error(values, rate, n, dispersion_mode)
    return summarize_errors(errors)


def summarize_errors(errors, z=1.959963984540054):
    """Return an ErrorEstimate for an array of per-trial error values."""

    errors = np.asarray(errors, dtype=float)
    count = errors.size
    if count == 0:
        raise EmptySampleError("No error values to summarize")

    mean = math.fsum(errors) / count
    stderr = 0.0
    if count > 1:
        stderr = float(np.std(errors, ddof=1) / math.sqrt(count))
    return ErrorEstimate(
        mean=mean,
        stderr=stderr,
        ci95=(max(0.0, mean - z * stderr), min(1.0, mean + z * stderr)),
        trials=count,
    )
