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

import functools
import multiprocessing

import numpy as np

from noma_rep import logger
from noma_rep import meta
from noma_rep.meta import __version__  # noqa


# Stream tags keep independent Monte Carlo engines from sharing random
# numbers when they are run with the same user seed.
STREAM_CHANNEL = 1
STREAM_SINR_EXACT = 2
STREAM_SINR_OMEGA = 3
STREAM_MOMENTS = 4
STREAM_SIC = 5
STREAM_LINKLEVEL = 6
STREAM_INTERLEAVER = 7


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class InvalidLayoutError(ValueError):
    """A frame layout violates D_(b) * K_(b) = L or its ordering rules."""


class ConditionViolatedError(ValueError):
    """A closed-form bound was asked for outside its validity region."""


class InfeasibleError(ValueError):
    """No parameter value meets the requested target."""


class EmptySampleError(ValueError):
    """An estimator received no samples."""


class ConfigError(SyntaxError):
    """An experiment configuration could not be parsed or validated."""


def stream_generator(seed, *key):
    """Return a counter-based generator keyed by the seed and a key path.

    The generator is a Philox instance whose key is derived from
    `SeedSequence(seed, spawn_key=key)`, so a given (seed, key) pair always
    yields the same numbers no matter which process asks for them.

    :param seed: User seed.
    :type seed: Integer
    :param key: Stream tag followed by chunk or trial indices.
    :type key: Integer
    :returns: Object
    """

    if seed < 0 or any(i < 0 for i in key):
        raise DomainError("Seeds and stream keys must be nonnegative.")

    sequence = np.random.SeedSequence(
        entropy=int(seed), spawn_key=tuple(int(i) for i in key)
    )
    return np.random.Generator(np.random.Philox(sequence))


def chunk_plan(trials, chunk_trials=meta.__chunk_trials__):
    """Split a trial count into fixed-size (index, size) chunks.

    The split depends only on `trials` and `chunk_trials`, never on the
    number of workers.

    :param trials: Total number of trials.
    :type trials: Integer
    :param chunk_trials: Trials per chunk.
    :type chunk_trials: Integer
    :returns: List
    """

    if trials < 1:
        raise DomainError("trials must be >= 1, got {}".format(trials))

    chunks = list()
    index = 0
    remaining = int(trials)
    while remaining > 0:
        size = min(chunk_trials, remaining)
        chunks.append((index, size))
        remaining -= size
        index += 1

    return chunks


def trial_range(chunk, chunk_trials=meta.__chunk_trials__):
    """Return the global trial indices covered by a chunk_plan entry.

    Engines that key their draws per trial use this so that results do not
    depend on how the trials were split into chunks.

    :param chunk: (index, size) pair from chunk_plan.
    :type chunk: Tuple
    :param chunk_trials: Trials per chunk used to build the plan.
    :type chunk_trials: Integer
    :returns: Object
    """

    index, size = chunk
    start = int(index) * int(chunk_trials)
    return range(start, start + int(size))


class Processor:
    """Processing class, fans chunked work out over a process pool."""

    cpu_count = multiprocessing.cpu_count() * 2
    if cpu_count > 16:
        cpu_count = 16

    def __init__(self, workers=1, debug=False):
        """Initialize the Processor.

        :param workers: Number of worker processes, 1 runs inline.
        :type workers: Integer
        :param debug: Enable | Disable debug logging.
        :type debug: Boolean
        """

        self.workers = max(1, min(int(workers or 1), self.cpu_count))
        self.log = logger.getLogger(name="noma_rep", debug_logging=debug)

    def map(self, func, tasks):
        """Apply `func` to every task and return results in task order.

        :param func: Picklable callable.
        :type func: Object
        :param tasks: Task descriptors.
        :type tasks: List
        :returns: List
        """

        tasks = list(tasks)
        if self.workers == 1 or len(tasks) < 2:
            return [func(i) for i in tasks]

        processes = min(self.workers, len(tasks))
        self.log.debug(
            "Dispatching [ %s ] tasks to [ %s ] workers", len(tasks), processes
        )
        with multiprocessing.Pool(processes=processes) as pool:
            return list(pool.imap(func, tasks))

    def run_trials(self, func, trials, **kwargs):
        """Run a chunk worker over the chunk plan of `trials`.

        `func` is called as func((index, size), **kwargs) and must be a
        module level function so it can be pickled.

        :param func: Chunk worker.
        :type func: Object
        :param trials: Total number of trials.
        :type trials: Integer
        :returns: List
        """

        worker = functools.partial(func, **kwargs)
        return self.map(worker, chunk_plan(trials))
