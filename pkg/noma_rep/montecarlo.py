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

from scipy import stats

import noma_rep

from noma_rep import channel
from noma_rep import DomainError
from noma_rep import EmptySampleError
from noma_rep import fbl
from noma_rep import logger


EXACT = "exact"
OMEGA = "omega-approx"
LINKLEVEL = "linklevel-empirical"

DECISION_OUTAGE = "outage"
DECISION_BERNOULLI = "bernoulli"

# Two-sided 95% standard normal quantile.
Z95 = 1.959963984540054

# Trials held in memory at once by the link-level engine.
LINKLEVEL_BATCH = 256


@dataclasses.dataclass(frozen=True)
class SinrSampleSet:
    values: np.ndarray
    copies: int
    interferers: int
    snr: float
    seed: int
    trials: int
    kind: str


@dataclasses.dataclass(frozen=True)
class OutageEstimate:
    """Empirical outage with a Wilson 95% interval."""

    p_hat: float
    trials: int
    ci95: tuple
    count: int = 0

    @property
    def halfwidth(self):
        """Half width of the 95% interval."""

        return 0.5 * (self.ci95[1] - self.ci95[0])


@dataclasses.dataclass(frozen=True)
class MomentDiag:
    """Empirical moments of W = sum(alpha_l Y_l) next to their predictions.

    Each empirical mean carries its standard error. Cross moments need two
    copies and are None when D = 1.
    """

    copies: int
    interferers: int
    trials: int
    mean_w: float
    mean_w_se: float
    predicted_mean_w: float
    second_w: float
    second_w_se: float
    predicted_second_w: float
    mean_alpha_sq: float
    mean_alpha_sq_se: float
    predicted_alpha_sq: float
    mean_alpha_cross: float
    mean_alpha_cross_se: float
    predicted_alpha_cross: float
    ks_distance: float


@dataclasses.dataclass(frozen=True)
class LayerErrorEstimate:
    """Per-layer result of a SIC frame simulation.

    `epsilon` is the genie-aided error of the layer, `rho` the probability
    that a user or any lower layer user sharing its blocks failed, and
    `user_error` the error of the layer under real SIC decoding.
    """

    layer: int
    users: int
    epsilon: OutageEstimate
    rho: OutageEstimate
    user_error: OutageEstimate
    union_bound: float


@dataclasses.dataclass(frozen=True)
class LinkLevelEstimate:
    """Link-level average error next to the per-trial analytic SINR."""

    user: int
    copies: int
    interferers: int
    symbols: int
    measured: fbl.ErrorEstimate
    analytic: fbl.ErrorEstimate
    mean_sinr_measured: float
    mean_sinr_analytic: float

    @property
    def gap(self):
        """Measured minus analytic mean error."""

        return self.measured.mean - self.analytic.mean


def wilson_interval(count, trials, z=Z95):
    """Wilson score interval for a binomial proportion.

    The interval always contains count / trials.

    :param count: Number of events.
    :type count: Integer
    :param trials: Number of trials.
    :type trials: Integer
    :returns: Tuple
    """

    if trials < 1:
        raise EmptySampleError("No trials to build an interval from")

    p_hat = count / trials
    z2 = z * z
    denominator = 1.0 + z2 / trials
    center = (p_hat + z2 / (2.0 * trials)) / denominator
    half = (
        z
        * math.sqrt(p_hat * (1.0 - p_hat) / trials + z2 / (4.0 * trials**2))
        / denominator
    )
    lo = min(p_hat, max(0.0, center - half))
    hi = max(p_hat, min(1.0, center + half))
    return (lo, hi)


def outage_from_counts(count, trials):
    """Build an OutageEstimate from an event count."""

    count = int(count)
    trials = int(trials)
    return OutageEstimate(
        p_hat=count / trials if trials else 0.0,
        trials=trials,
        ci95=wilson_interval(count, trials),
        count=count,
    )


def _validate(copies, interferers, snr, trials):
    if copies < 1:
        raise DomainError("D must be >= 1, got %r" % copies)
    if interferers < 0:
        raise DomainError("M must be >= 0, got %r" % interferers)
    if not snr > 0:
        raise DomainError("snr must be positive, got %r" % snr)
    if trials < 1:
        raise DomainError("trials must be >= 1, got %r" % trials)


def sinr_from_gains(own, interference, noise):
    """SINR of a repetition code after MRC over the copies.

    `own` and `interference` are (..., D) arrays of desired and aggregate
    co-channel power gains per copy, with P = 1.
    """

    total = own.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        seen = (interference * own).sum(axis=-1) / total
    seen = np.where(total > 0, seen, 0.0)
    return total / (seen + noise)


def _exact_chunk(chunk, copies, interferers, snr, seed, force_unit=False):
    index, size = chunk
    generator = noma_rep.stream_generator(
        seed, noma_rep.STREAM_SINR_EXACT, index
    )
    if force_unit:
        own = np.ones((size, copies))
        interference = np.full((size, copies), float(interferers))
    else:
        own = generator.standard_exponential((size, copies))
        if interferers:
            interference = generator.standard_exponential(
                (size, copies, interferers)
            ).sum(axis=-1)
        else:
            interference = np.zeros((size, copies))

    return sinr_from_gains(own, interference, 1.0 / snr)


def _omega_chunk(chunk, copies, interferers, snr, seed):
    index, size = chunk
    generator = noma_rep.stream_generator(
        seed, noma_rep.STREAM_SINR_OMEGA, index
    )
    dof = (copies + 1) / 2.0
    total = generator.standard_exponential((size, copies)).sum(axis=-1)
    # chi^2 with 2NM degrees of freedom, divided by N.
    omega = generator.gamma(interferers * dof, 2.0, size) / dof
    return total / (0.5 * omega + 1.0 / snr)


def sample_sinr_exact(
    copies,
    interferers,
    snr,
    trials,
    seed,
    workers=1,
    force_unit=False,
    debug=False,
):
    """Draw the post-MRC SINR under independent Rayleigh fading.

    Results depend only on (seed, trials), never on `workers`.

    :param copies: D.
    :type copies: Integer
    :param interferers: M.
    :type interferers: Integer
    :param snr: Linear SNR.
    :type snr: Float
    :param trials: Number of draws.
    :type trials: Integer
    :param seed: User seed.
    :type seed: Integer
    :param workers: Worker processes.
    :type workers: Integer
    :param force_unit: Replace every fading gain with 1.
    :type force_unit: Boolean
    :returns: Object
    """

    _validate(copies, interferers, snr, trials)
    chunks = noma_rep.Processor(workers=workers, debug=debug).run_trials(
        _exact_chunk,
        trials,
        copies=copies,
        interferers=interferers,
        snr=snr,
        seed=seed,
        force_unit=force_unit,
    )
    return SinrSampleSet(
        values=np.concatenate(chunks),
        copies=copies,
        interferers=interferers,
        snr=snr,
        seed=seed,
        trials=trials,
        kind=EXACT,
    )


def sample_sinr_omega(
    copies, interferers, snr, trials, seed, workers=1, debug=False
):
    """Draw the SINR with the interference replaced by its chi-squared fit.

    :raises DomainError: when M = 0, the approximation has no interference.
    :returns: Object
    """

    _validate(copies, interferers, snr, trials)
    if interferers == 0:
        raise DomainError("The chi-squared approximation needs M >= 1")

    chunks = noma_rep.Processor(workers=workers, debug=debug).run_trials(
        _omega_chunk,
        trials,
        copies=copies,
        interferers=interferers,
        snr=snr,
        seed=seed,
    )
    return SinrSampleSet(
        values=np.concatenate(chunks),
        copies=copies,
        interferers=interferers,
        snr=snr,
        seed=seed,
        trials=trials,
        kind=OMEGA,
    )


def estimate_outage(samples, threshold):
    """Fraction of SINR draws strictly below the threshold.

    :param samples: SINR sample set.
    :type samples: Object
    :param threshold: SINR threshold T.
    :type threshold: Float
    :returns: Object
    """

    if not (threshold > 0 and math.isfinite(threshold)):
        raise DomainError("T must be positive and finite, got %r" % threshold)

    values = np.asarray(samples.values)
    if values.size == 0:
        raise EmptySampleError("No SINR samples to estimate outage from")

    count = np.count_nonzero(values < threshold)
    return outage_from_counts(count, values.size)


def _moment_chunk(chunk, copies, interferers, seed):
    index, size = chunk
    generator = noma_rep.stream_generator(
        seed, noma_rep.STREAM_MOMENTS, index
    )
    dof = (copies + 1) / 2.0
    gains = generator.standard_exponential((size, copies))
    alpha = gains / gains.sum(axis=-1, keepdims=True)
    per_copy = generator.gamma(interferers, 2.0, (size, copies))
    w = (alpha * per_copy).sum(axis=-1)
    omega = generator.gamma(interferers * dof, 2.0, size) / dof
    cross = alpha[:, 0] * alpha[:, 1] if copies > 1 else np.zeros(0)
    return w, omega, alpha[:, 0] ** 2, cross


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(np.mean(values)) if values.size else None, None

    return (
        float(np.mean(values)),
        float(np.std(values, ddof=1) / math.sqrt(values.size)),
    )


def ks_distance(left, right):
    """Two-sample Kolmogorov-Smirnov statistic."""

    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    if left.size == 0 or right.size == 0:
        raise EmptySampleError("KS distance needs two nonempty samples")

    return float(stats.ks_2samp(left, right).statistic)


def moment_diagnostics(
    copies, interferers, trials, seed, workers=1, debug=False
):
    """Check the moment match between W and Omega by simulation.

    W = sum(alpha_l Y_l) with alpha the normalized fading powers and Y_l
    chi-squared with 2M degrees of freedom. Its first two moments are
    2M and 4M(M + 1/N), those of Omega ~ chi^2_{2NM} / N.

    :returns: Object
    """

    _validate(copies, interferers, 1.0, trials)
    if interferers == 0:
        raise DomainError("Moment diagnostics need M >= 1")

    chunks = noma_rep.Processor(workers=workers, debug=debug).run_trials(
        _moment_chunk,
        trials,
        copies=copies,
        interferers=interferers,
        seed=seed,
    )
    w = np.concatenate([i[0] for i in chunks])
    omega = np.concatenate([i[1] for i in chunks])
    alpha_sq = np.concatenate([i[2] for i in chunks])
    cross = np.concatenate([i[3] for i in chunks])

    dof = (copies + 1) / 2.0
    mean_w, mean_w_se = _mean_se(w)
    second_w, second_w_se = _mean_se(w**2)
    mean_sq, mean_sq_se = _mean_se(alpha_sq)
    if copies > 1:
        mean_cross, mean_cross_se = _mean_se(cross)
        predicted_cross = 1.0 / (copies * (copies + 1))
    else:
        mean_cross = mean_cross_se = predicted_cross = None

    return MomentDiag(
        copies=copies,
        interferers=interferers,
        trials=trials,
        mean_w=mean_w,
        mean_w_se=mean_w_se,
        predicted_mean_w=2.0 * interferers,
        second_w=second_w,
        second_w_se=second_w_se,
        predicted_second_w=4.0 * interferers * (interferers + 1.0 / dof),
        mean_alpha_sq=mean_sq,
        mean_alpha_sq_se=mean_sq_se,
        predicted_alpha_sq=2.0 / (copies * (copies + 1)),
        mean_alpha_cross=mean_cross,
        mean_alpha_cross_se=mean_cross_se,
        predicted_alpha_cross=predicted_cross,
        ks_distance=ks_distance(w, omega),
    )


def diversity_slope(
    copies, threshold, snr_values, trials, seed, lo=1.0e-5, hi=1.0e-2
):
    """Fit the log-log slope of the simulated M = 0 outage against SNR.

    Only points whose estimate lies in [lo, hi] are fitted; the slope of a
    D-fold repetition code approaches -D.

    :returns: Float
    """

    points = list()
    for snr in snr_values:
        samples = sample_sinr_exact(copies, 0, snr, trials, seed)
        estimate = estimate_outage(samples, threshold)
        if estimate.count and lo <= estimate.p_hat <= hi:
            points.append((math.log10(snr), math.log10(estimate.p_hat)))

    if len(points) < 2:
        raise EmptySampleError(
            "Fewer than two SNR points fall in the fitting range"
        )

    x, y = zip(*points)
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def _decide(gamma, threshold, decision, uniforms, rate, n):
    if decision == DECISION_OUTAGE:
        return gamma >= threshold

    return uniforms >= fbl.pointwise_error(gamma, rate, n)


def _sic_chunk(chunk, layout, thresholds, snr, seed, decision, n):
    trials = noma_rep.trial_range(chunk)
    size = len(trials)
    n_layers = layout.n_layers
    draw = channel.draw_channels(layout, snr, seed, trials)
    noise = draw.noise_power

    # gains[t, l, b - 1] is |h|^2 of the layer b user on block l.
    rows = np.arange(layout.blocks)[:, None]
    gains = draw.power_gains[:, rows, layout.block_layer_users()]

    # One uniform per user drives both decoding passes.
    uniforms = None
    if decision == DECISION_BERNOULLI:
        uniforms = np.stack(
            [
                noma_rep.stream_generator(
                    seed, noma_rep.STREAM_SIC, trial
                ).random(layout.n_users)
                for trial in trials
            ]
        )
    rates = [math.log2(1.0 + t) for t in thresholds]

    remaining = np.ones((size, layout.blocks, n_layers), dtype=bool)
    failed_below = np.zeros((size, layout.blocks), dtype=bool)
    counts = np.zeros((n_layers, 3), dtype=np.int64)

    for b in range(1, n_layers + 1):
        threshold = thresholds[b - 1]
        for k in layout.users_in_layer(b):
            blocks = list(layout.blocks_of(k))
            user_uniforms = None if uniforms is None else uniforms[:, k]
            own = gains[:, blocks, b - 1]
            others = gains[:, blocks, :]

            genie = others[:, :, b:].sum(axis=-1)
            genie_ok = _decide(
                sinr_from_gains(own, genie, noise),
                threshold,
                decision,
                user_uniforms,
                rates[b - 1],
                n,
            )

            live = remaining[:, blocks, :].copy()
            live[:, :, b - 1] = False
            actual = (others * live).sum(axis=-1)
            actual_ok = _decide(
                sinr_from_gains(own, actual, noise),
                threshold,
                decision,
                user_uniforms,
                rates[b - 1],
                n,
            )

            chain_failed = ~actual_ok | failed_below[:, blocks].any(axis=1)
            counts[b - 1, 0] += np.count_nonzero(~genie_ok)
            counts[b - 1, 1] += np.count_nonzero(chain_failed)
            counts[b - 1, 2] += np.count_nonzero(~actual_ok)

            remaining[:, blocks, b - 1] = ~actual_ok[:, None]
            failed_below[:, blocks] |= ~actual_ok[:, None]

    return counts


def simulate_sic_frame(
    layout,
    thresholds,
    snr,
    trials,
    seed,
    workers=1,
    decision=DECISION_OUTAGE,
    n=None,
    debug=False,
):
    """Simulate SIC decoding of a whole frame layer by layer.

    Every trial decodes one draw_channel frame, so counts depend only on
    (seed, trials).

    Layer b is decoded with every still undecoded user as interference:
    higher layers always, and lower layer users only where they failed.
    A genie pass on the same draws removes all lower layers to give the
    per-layer error. With decision="bernoulli" a decode succeeds with
    probability 1 - Q(sqrt(n / V)(log2(1 + gamma) - R_b)) instead of
    gamma >= T_b.

    :param layout: Frame layout.
    :type layout: Object
    :param thresholds: Per-layer SINR thresholds, layer 1 first.
    :type thresholds: List
    :param snr: Linear SNR.
    :type snr: Float
    :param trials: Number of frames.
    :type trials: Integer
    :param seed: User seed.
    :type seed: Integer
    :param decision: "outage" or "bernoulli".
    :type decision: String
    :param n: Codeword length for the bernoulli decision.
    :type n: Integer
    :returns: List
    """

    thresholds = tuple(float(t) for t in thresholds)
    if len(thresholds) != layout.n_layers:
        raise DomainError(
            "Expected [ %s ] thresholds, got [ %s ]"
            % (layout.n_layers, len(thresholds))
        )
    if any(not t > 0 for t in thresholds):
        raise DomainError("Thresholds must be positive: %r" % (thresholds,))
    if decision not in (DECISION_OUTAGE, DECISION_BERNOULLI):
        raise DomainError("Unknown decision rule [ %s ]" % decision)
    if decision == DECISION_BERNOULLI and not (n and n >= 2):
        raise DomainError("The bernoulli decision needs n >= 2")
    _validate(1, 0, snr, trials)

    log = logger.getLogger(name="noma_rep", debug_logging=debug)
    log.debug(
        "SIC frame L=%s B=%s trials=%s decision=%s",
        layout.blocks,
        layout.n_layers,
        trials,
        decision,
    )
    counts = sum(
        noma_rep.Processor(workers=workers, debug=debug).run_trials(
            _sic_chunk,
            trials,
            layout=layout,
            thresholds=thresholds,
            snr=snr,
            seed=seed,
            decision=decision,
            n=n,
        )
    )

    results = list()
    union = 0.0
    for b in range(1, layout.n_layers + 1):
        observations = trials * layout.layer(b).users
        genie, chain, actual = counts[b - 1]
        epsilon = outage_from_counts(genie, observations)
        union += epsilon.p_hat
        results.append(
            LayerErrorEstimate(
                layer=b,
                users=layout.layer(b).users,
                epsilon=epsilon,
                rho=outage_from_counts(chain, observations),
                user_error=outage_from_counts(actual, observations),
                union_bound=min(1.0, union),
            )
        )

    return results


def _linklevel_chunk(
    chunk,
    layout,
    user,
    rate,
    n,
    snr,
    seed,
    genie,
    measure_noise,
    interleavers,
):
    trials = noma_rep.trial_range(chunk)
    symbols = n // 2
    blocks = list(layout.blocks_of(user))
    if genie:
        layer = layout.layer_of(user)
        sources = [
            q
            for q in range(layout.n_users)
            if q != user and layout.layer_of(q) > layer
        ]
    else:
        sources = [q for q in range(layout.n_users) if q != user]
    occupancy = layout.block_user_matrix()[np.ix_(blocks, sources)]
    collisions = list(zip(*np.nonzero(occupancy)))

    measured = list()
    analytic = list()
    sinr_measured = list()
    sinr_analytic = list()
    for start in range(0, len(trials), LINKLEVEL_BATCH):
        batch_trials = trials[start : start + LINKLEVEL_BATCH]
        batch = len(batch_trials)

        draw = channel.draw_channels(layout, snr, seed, batch_trials)
        noise_power = draw.noise_power
        own = draw.gains[:, blocks, user]
        own_power = np.abs(own) ** 2
        total = own_power.sum(axis=-1)
        cross = draw.gains[:, blocks, :][:, :, sources] * occupancy

        generators = [
            noma_rep.stream_generator(seed, noma_rep.STREAM_LINKLEVEL, t)
            for t in batch_trials
        ]
        bits = np.stack(
            [
                g.integers(0, 2, (len(sources), 2 * symbols), dtype=np.int8)
                for g in generators
            ]
        )
        tx = channel.qpsk_modulate(bits)

        # Copy l of user q reaches the deinterleaved stream of the desired
        # user as s_q[perm_lq[inverse(perm_lk)]].
        residue = np.zeros((batch, symbols), dtype=complex)
        for i, j in collisions:
            mine = interleavers[(blocks[i], user)]
            theirs = interleavers[(blocks[i], sources[j])]
            seen = mine.deinterleave(theirs.apply(tx[:, j, :]))
            residue += np.conj(own[:, i, None]) * cross[:, i, j, None] * seen

        if measure_noise:
            noise = np.stack(
                [
                    channel.complex_gaussian(
                        g, (len(blocks), symbols), noise_power
                    )
                    for g in generators
                ]
            )
            residue += (np.conj(own)[:, :, None] * noise).sum(axis=1)
            disturbance = np.mean(np.abs(residue) ** 2, axis=-1)
        else:
            disturbance = (
                np.mean(np.abs(residue) ** 2, axis=-1) + total * noise_power
            )

        gamma_measured = total**2 / disturbance
        interference = (np.abs(cross) ** 2).sum(axis=-1)
        gamma_analytic = sinr_from_gains(own_power, interference, noise_power)

        measured.append(fbl.pointwise_error(gamma_measured, rate, n))
        analytic.append(fbl.pointwise_error(gamma_analytic, rate, n))
        sinr_measured.append(gamma_measured)
        sinr_analytic.append(gamma_analytic)

    return (
        np.concatenate(measured),
        np.concatenate(analytic),
        np.concatenate(sinr_measured),
        np.concatenate(sinr_analytic),
    )


def simulate_linklevel(
    layout,
    user,
    rate,
    n,
    snr,
    trials,
    seed,
    workers=1,
    genie=True,
    measure_noise=False,
    debug=False,
):
    """Symbol-level simulation of one user's repetition code.

    Every user sends n/2 Gray QPSK symbols; each copy goes through its own
    random interleaver. The receiver combines the deinterleaved copies by
    MRC, the SINR is signal power over the interference measured across
    symbol positions (plus the expected noise unless `measure_noise`) and
    each trial contributes the normal-approximation error at rate R. The
    same draws also give the error of the analytic SINR, so the gap caused
    by finite interleavers is measured rather than assumed.

    :param layout: Frame layout.
    :type layout: Object
    :param user: User index.
    :type user: Integer
    :param rate: Rate R in bits per channel use.
    :type rate: Float
    :param n: Codeword length in bits, even.
    :type n: Integer
    :param genie: Only higher layers interfere.
    :type genie: Boolean
    :returns: Object
    """

    if user not in layout.assignment:
        raise DomainError("User [ %s ] is not in the layout" % user)
    if n < 2 or n % 2:
        raise DomainError("n must be even and >= 2, got %r" % n)
    if not rate > 0:
        raise DomainError("Rate must be positive")
    _validate(1, 0, snr, trials)

    # One fixed interleaver per (copy, user) pair on the user's blocks.
    interleavers = {
        (block, q): channel.make_interleaver(n // 2, seed, block, q)
        for block in layout.blocks_of(user)
        for q in layout.users_in_block(block)
    }
    chunks = noma_rep.Processor(workers=workers, debug=debug).run_trials(
        _linklevel_chunk,
        trials,
        layout=layout,
        user=user,
        rate=rate,
        n=n,
        snr=snr,
        seed=seed,
        genie=genie,
        measure_noise=measure_noise,
        interleavers=interleavers,
    )
    measured = np.concatenate([i[0] for i in chunks])
    analytic = np.concatenate([i[1] for i in chunks])
    layer = layout.layer_of(user)
    return LinkLevelEstimate(
        user=user,
        copies=len(layout.blocks_of(user)),
        interferers=(
            layout.n_layers - layer if genie else layout.n_layers - 1
        ),
        symbols=n // 2,
        measured=fbl.summarize_errors(measured),
        analytic=fbl.summarize_errors(analytic),
        mean_sinr_measured=float(
            np.mean(np.concatenate([i[2] for i in chunks]))
        ),
        mean_sinr_analytic=float(
            np.mean(np.concatenate([i[3] for i in chunks]))
        ),
    )
