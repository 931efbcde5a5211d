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

from scipy import special

from noma_rep import bounds
from noma_rep import channel
from noma_rep import DomainError
from noma_rep import fbl
from noma_rep import InfeasibleError
from noma_rep import logger


MODE_EXPONENTIAL = "exponential"
MODE_DYADIC = "dyadic"
MODE_FBL = "fbl"
MODES = (MODE_EXPONENTIAL, MODE_DYADIC, MODE_FBL)

TARGET_EQUAL_EPS = "equal-eps"
TARGET_EQUAL_RHO = "equal-rho"
TARGETS = (TARGET_EQUAL_EPS, TARGET_EQUAL_RHO)

# Layer violation flags.
TARGET_UNREACHABLE = "target-unreachable"
BOUND_INVALID = "bound-invalid"
INTERFERER_RULE = "interferer-rule"

THRESHOLD_FLOOR = 1.0e-6
RELATIVE_TOLERANCE = 1.0e-6
MONOTONE_CHECK_POINTS = 32


@dataclasses.dataclass(frozen=True)
class LayerEntry:
    layer: int
    copies: int
    users: int
    interferers: int
    threshold: float = None
    rate: float = None
    epsilon: float = None
    rho: float = None
    rho_bound: float = None
    slack: float = 0.0
    violations: tuple = ()

    @property
    def feasible(self):
        """True when the layer carries no violation flag."""

        return not self.violations


@dataclasses.dataclass(frozen=True)
class LayerPlan:
    """Per-layer thresholds, rates and error budgets of one frame.

    `rho` follows the exact propagation recursion and `rho_bound` the
    running sum of per-layer errors.
    """

    blocks: int
    snr: float
    mode: str
    layers: tuple
    eps_target: float = None
    target: str = TARGET_EQUAL_EPS
    n: int = None

    @property
    def n_layers(self):
        """Number of layers B."""

        return len(self.layers)

    @property
    def feasible(self):
        """True when every layer is feasible."""

        return all(i.feasible for i in self.layers)

    @property
    def unreachable(self):
        """Layers whose error target could not be met at any threshold."""

        return [
            i.layer for i in self.layers if TARGET_UNREACHABLE in i.violations
        ]

    @property
    def layout(self):
        """Rebuild the frame layout of the plan."""

        return channel.build_layout_custom(
            [(i.copies, i.users) for i in self.layers]
        )


def rate_for_layer(threshold):
    """R = log2(1 + T)."""

    if not threshold > 0:
        raise DomainError("T must be positive, got %r" % threshold)

    return math.log2(1.0 + threshold)


def threshold_for_rate(rate):
    """T = 2^R - 1."""

    if not rate > 0:
        raise DomainError("R must be positive, got %r" % rate)

    return math.expm1(rate * math.log(2.0))


def _check_monotone(func, lo, hi, log):
    grid = np.geomspace(lo, hi, MONOTONE_CHECK_POINTS)
    values = [func(t) for t in grid]
    if any(b < a for a, b in zip(values, values[1:])):
        log.warning(
            "Bound is not monotone in T on [ %.6g, %.6g ], bisection may"
            " return a local crossing",
            lo,
            hi,
        )
        return False

    return True


def solve_threshold(copies, interferers, snr, eps_target, debug=False):
    """Largest threshold whose outage bound stays at or below a target.

    M = 0 inverts the exact cdf. Otherwise the bracket [1e-6, T_max] is
    grown geometrically until the bound exceeds the target (or stops
    applying) and then bisected to a relative width of 1e-6.

    :param copies: D.
    :type copies: Integer
    :param interferers: M.
    :type interferers: Integer
    :param snr: Linear SNR.
    :type snr: Float
    :param eps_target: Target outage in (0, 0.5).
    :type eps_target: Float
    :raises InfeasibleError: when even the smallest threshold misses.
    :returns: Float
    """

    if not 0 < eps_target < 0.5:
        raise DomainError("Target must be in (0, 0.5), got %r" % eps_target)
    if not snr > 0:
        raise DomainError("snr must be positive, got %r" % snr)

    if interferers == 0:
        return snr * float(special.gammaincinv(copies, eps_target))

    log = logger.getLogger(name="noma_rep", debug_logging=debug)

    def bound(threshold):
        return bounds.outage_upper(copies, interferers, threshold, snr)

    lo = THRESHOLD_FLOOR
    if bound(lo) > eps_target:
        raise InfeasibleError(
            "Outage bound %.3g at T=%g already exceeds %.3g for D=%s M=%s"
            % (bound(lo), lo, eps_target, copies, interferers)
        )

    hi = lo * 2.0
    while bound(hi) <= eps_target:
        lo = hi
        hi *= 2.0

    _check_monotone(bound, THRESHOLD_FLOOR, hi, log)
    while hi / lo - 1.0 > RELATIVE_TOLERANCE:
        mid = math.sqrt(lo * hi)
        if bound(mid) <= eps_target:
            lo = mid
        else:
            hi = mid

    log.debug(
        "Threshold [ %.8g ] for D=%s M=%s snr=%.6g eps=%.3g",
        lo,
        copies,
        interferers,
        snr,
        eps_target,
    )
    return lo


def propagated_error(eps_list):
    """Error probability with SIC propagation at each layer.

    rho_1 = eps_1 and rho_b = rho_(b-1) + prod_(b'<b)(1 - eps_b') eps_b.

    :param eps_list: Per-layer error probabilities, layer 1 first.
    :type eps_list: List
    :returns: List
    """

    eps_list = [float(i) for i in eps_list]
    if any(not 0 <= i <= 1 for i in eps_list):
        raise DomainError("Errors must lie in [0, 1]: %r" % eps_list)

    rho = list()
    running = 0.0
    survive = 1.0
    for eps in eps_list:
        running += survive * eps
        survive *= 1.0 - eps
        rho.append(running)

    return rho


def _smallest_divisor_at_least(blocks, value):
    for divisor in range(max(1, int(math.ceil(value - 1e-9))), blocks + 1):
        if blocks % divisor == 0:
            return divisor

    return blocks


def exponential_copies(n_layers, threshold):
    """Unrounded copies 4 T 2^((B - b) / 2) per layer."""

    if n_layers < 1 or not threshold > 0:
        raise DomainError("Needs B >= 1 and T > 0")

    return [
        4.0 * threshold * 2 ** ((n_layers - b) / 2.0)
        for b in range(1, n_layers + 1)
    ]


def exponential_layout(n_layers, threshold, search=8):
    """Round the exponentially decreasing copy counts onto a frame.

    Every L in [ceil(D_1), search * ceil(D_1)] is tried; each layer takes
    the smallest divisor of L at or above its unrounded count and the L
    with the least total relative slack wins, ties going to the smaller L.

    :returns: Tuple of (blocks, [(copies, users)], [slack])
    """

    raw = exponential_copies(n_layers, threshold)
    first = int(math.ceil(raw[0] - 1e-9))
    best = None
    for blocks in range(first, search * first + 1):
        copies = [_smallest_divisor_at_least(blocks, i) for i in raw]
        if any(a < b for a, b in zip(copies, copies[1:])):
            continue
        cost = sum((d - r) / r for d, r in zip(copies, raw))
        if best is None or cost < best[0] - 1e-12:
            best = (cost, blocks, copies)

    _, blocks, copies = best
    return (
        blocks,
        [(d, blocks // d) for d in copies],
        [d - r for d, r in zip(copies, raw)],
    )


def _violations(copies, interferers, threshold, snr):
    flags = list()
    if interferers >= 1:
        inputs = bounds.BoundInputs(copies, interferers, threshold, snr)
        if not inputs.d > 0:
            flags.append(BOUND_INVALID)

    rules = bounds.design_rules(
        copies=copies, interferers=interferers, threshold=threshold
    )
    if not rules["rule_satisfied"]:
        flags.append(INTERFERER_RULE)

    return flags


def _layer_target(eps_target, n_layers, target):
    if target == TARGET_EQUAL_EPS:
        return eps_target

    return -math.expm1(math.log1p(-eps_target) / n_layers)


def plan_frame(
    n_layers,
    snr,
    threshold=None,
    eps_target=None,
    mode=MODE_EXPONENTIAL,
    blocks=None,
    target=TARGET_EQUAL_EPS,
    n=None,
    debug=False,
):
    """Plan the layers of a frame.

    The layout comes from the exponential copy rule (mode "exponential",
    needs `threshold`) or is dyadic on `blocks` (modes "dyadic" and
    "fbl").
    With `eps_target` every layer gets the largest threshold meeting its
    share of the target; in mode "fbl" the largest rate meeting it at
    codeword length `n`. Without a target the design threshold is used
    on every layer. Problems are flagged per layer and never raised.

    :param n_layers: B.
    :type n_layers: Integer
    :param snr: Linear SNR.
    :type snr: Float
    :param threshold: Design threshold T.
    :type threshold: Float
    :param eps_target: Outage or error target.
    :type eps_target: Float
    :param mode: "exponential", "dyadic" or "fbl".
    :type mode: String
    :param blocks: Frame size L for dyadic layouts.
    :type blocks: Integer
    :param target: "equal-eps" or "equal-rho".
    :type target: String
    :param n: Codeword length for mode "fbl".
    :type n: Integer
    :returns: Object
    """

    if n_layers < 1:
        raise DomainError("B must be >= 1, got %r" % n_layers)
    if mode not in MODES:
        raise DomainError("Unknown plan mode [ %s ]" % mode)
    if target not in TARGETS:
        raise DomainError("Unknown plan target [ %s ]" % target)
    if threshold is None and eps_target is None:
        raise DomainError("A plan needs a threshold or an error target")
    if mode == MODE_EXPONENTIAL and threshold is None:
        raise DomainError("Mode exponential needs a design threshold")
    if mode == MODE_FBL and (eps_target is None or not n):
        raise DomainError("Mode fbl needs an error target and n")

    log = logger.getLogger(name="noma_rep", debug_logging=debug)
    if mode == MODE_EXPONENTIAL:
        blocks, specs, slack = exponential_layout(n_layers, threshold)
    else:
        if not blocks:
            raise DomainError("Mode %s needs the frame size L" % mode)
        layout = channel.build_layout(blocks, n_layers)
        specs = [(i.copies, i.users) for i in layout.layers]
        slack = [0.0] * n_layers

    layer_eps = None
    if eps_target is not None:
        layer_eps = _layer_target(eps_target, n_layers, target)

    entries = list()
    for b, (copies, users) in enumerate(specs, start=1):
        interferers = n_layers - b
        violations = list()
        layer_threshold = threshold
        rate = None
        epsilon = None
        try:
            if mode == MODE_FBL:
                rate = fbl.max_rate_for_error(
                    copies, interferers, n, snr, layer_eps
                )
                layer_threshold = threshold_for_rate(rate)
                epsilon = fbl.avg_error_upper(
                    copies, interferers, rate, n, snr
                )
            elif layer_eps is not None:
                layer_threshold = solve_threshold(
                    copies, interferers, snr, layer_eps, debug=debug
                )
        except InfeasibleError as e:
            log.warning("Layer [ %s ] infeasible: %s", b, e)
            violations.append(TARGET_UNREACHABLE)
            layer_threshold = None

        if layer_threshold is not None:
            if rate is None:
                rate = rate_for_layer(layer_threshold)
            if epsilon is None:
                epsilon = bounds.outage_upper(
                    copies, interferers, layer_threshold, snr
                )
            violations.extend(
                _violations(copies, interferers, layer_threshold, snr)
            )

        entries.append(
            LayerEntry(
                layer=b,
                copies=copies,
                users=users,
                interferers=interferers,
                threshold=layer_threshold,
                rate=rate,
                epsilon=epsilon,
                slack=float(slack[b - 1]),
                violations=tuple(violations),
            )
        )

    return LayerPlan(
        blocks=blocks,
        snr=snr,
        mode=mode,
        layers=tuple(_with_propagation(entries)),
        eps_target=eps_target,
        target=target,
        n=n,
    )


def _with_propagation(entries):
    """Fill rho and rho_bound while every earlier layer has an error."""

    known = list()
    for entry in entries:
        if entry.epsilon is None:
            break
        known.append(entry.epsilon)

    rho = propagated_error(known)
    total = 0.0
    filled = list()
    for index, entry in enumerate(entries):
        if index < len(rho):
            total += entry.epsilon
            entry = dataclasses.replace(
                entry, rho=rho[index], rho_bound=min(1.0, total)
            )
        filled.append(entry)

    return filled


def plan_to_dict(plan):
    """Return the plan as a JSON/YAML friendly document."""

    return {
        "L": plan.blocks,
        "B": plan.n_layers,
        "snr": plan.snr,
        "mode": plan.mode,
        "target": plan.target,
        "eps_target": plan.eps_target,
        "n": plan.n,
        "feasible": plan.feasible,
        "layers": [
            {
                "b": i.layer,
                "D": i.copies,
                "K": i.users,
                "M": i.interferers,
                "T": i.threshold,
                "R": i.rate,
                "eps": i.epsilon,
                "rho": i.rho,
                "rho_bound": i.rho_bound,
                "slack": i.slack,
                "violations": list(i.violations),
            }
            for i in plan.layers
        ],
    }


def plan_from_dict(document):
    """Rebuild a LayerPlan from plan_to_dict output.

    :raises DomainError: when the document is malformed.
    """

    try:
        layers = tuple(
            LayerEntry(
                layer=int(i["b"]),
                copies=int(i["D"]),
                users=int(i["K"]),
                interferers=int(i["M"]),
                threshold=i.get("T"),
                rate=i.get("R"),
                epsilon=i.get("eps"),
                rho=i.get("rho"),
                rho_bound=i.get("rho_bound"),
                slack=float(i.get("slack", 0.0)),
                violations=tuple(i.get("violations", ())),
            )
            for i in document["layers"]
        )
        plan = LayerPlan(
            blocks=int(document["L"]),
            snr=float(document["snr"]),
            mode=document.get("mode", MODE_DYADIC),
            layers=layers,
            eps_target=document.get("eps_target"),
            target=document.get("target", TARGET_EQUAL_EPS),
            n=document.get("n"),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError("Malformed plan document: %s" % e)

    # Raises InvalidLayoutError for inconsistent layer tables.
    plan.layout
    return plan
