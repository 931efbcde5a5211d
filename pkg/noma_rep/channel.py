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

import noma_rep

from noma_rep import DomainError
from noma_rep import InvalidLayoutError


@dataclasses.dataclass(frozen=True)
class LayerSpec:
    """One layer of a frame: D copies per user, K users, M interferers.

    `index` is 1-based; after SIC has removed layers below `index` the
    remaining co-channel signals are one per higher layer.
    """

    index: int
    copies: int
    users: int
    interferers: int


@dataclasses.dataclass(frozen=True)
class FrameLayout:
    """Layered repetition structure of a frame of L blocks.

    `assignment` maps a user index to (block indices, layer index). Users
    are numbered from 0 in layer order and blocks from 0, so user 0 is the
    layer 1 user of any layout with K_(1) = 1.
    """

    blocks: int
    layers: tuple
    assignment: dict

    @property
    def n_layers(self):
        """Number of layers B."""

        return len(self.layers)

    @property
    def n_users(self):
        """Number of users in the frame."""

        return len(self.assignment)

    def layer(self, b):
        """Return the LayerSpec of 1-based layer `b`."""

        return self.layers[b - 1]

    def layer_of(self, k):
        """Return the 1-based layer of user `k`."""

        return self.assignment[k][1]

    def blocks_of(self, k):
        """Return the block indices of user `k`."""

        return self.assignment[k][0]

    def users_in_layer(self, b):
        """Return the users of layer `b`."""

        return [k for k, (_, layer) in self.assignment.items() if layer == b]

    def users_in_block(self, block):
        """Return the set U_l of users transmitting through a block."""

        return [
            k for k, (blocks, _) in self.assignment.items() if block in blocks
        ]

    def interferers(self, k):
        """Return {block: U_l minus k} over the blocks of user `k`."""

        if k not in self.assignment:
            raise DomainError("User [ %s ] is not in the layout" % k)

        return {
            block: [q for q in self.users_in_block(block) if q != k]
            for block in self.blocks_of(k)
        }

    def block_user_matrix(self):
        """Return an (L, users) 0/1 matrix of block occupancy."""

        matrix = np.zeros((self.blocks, self.n_users), dtype=bool)
        for k, (blocks, _) in self.assignment.items():
            matrix[list(blocks), k] = True

        return matrix

    def block_layer_users(self):
        """Return an (L, B) matrix holding the layer b user of each block."""

        matrix = np.full((self.blocks, self.n_layers), -1, dtype=np.int64)
        for k, (blocks, b) in self.assignment.items():
            matrix[list(blocks), b - 1] = k

        return matrix


@dataclasses.dataclass(frozen=True)
class ChannelDraw:
    """Rayleigh block-fading gains h[l][k] for every (block, user) pair."""

    gains: np.ndarray
    variance: float
    noise_power: float
    signal_power: float

    @property
    def power_gains(self):
        """X[l][k] = |h[l][k]|^2."""

        return np.abs(self.gains) ** 2

    @property
    def snr(self):
        """Linear SNR of the draw."""

        return self.signal_power * self.variance / self.noise_power


@dataclasses.dataclass(frozen=True)
class Interleaver:
    """A permutation of symbol indices; s_out[i] = s_in[permutation[i]]."""

    permutation: np.ndarray

    def __post_init__(self):
        size = len(self.permutation)
        if not np.array_equal(np.sort(self.permutation), np.arange(size)):
            raise DomainError("Interleaver permutation is not a bijection")

    def apply(self, symbols):
        """Interleave along the last axis."""

        return np.asarray(symbols)[..., self.permutation]

    def inverse(self):
        """Return the inverse permutation."""

        return Interleaver(permutation=np.argsort(self.permutation))

    def deinterleave(self, symbols):
        """Undo apply."""

        out = np.empty_like(np.asarray(symbols))
        out[..., self.permutation] = symbols
        return out


def build_layout_custom(specs):
    """Build a layout from per-layer (D, K) pairs.

    Users of a layer are striped contiguously: user j of layer b takes
    blocks [j * D_(b), (j + 1) * D_(b)).

    :param specs: Sequence of (copies, users) pairs, layer 1 first.
    :type specs: List
    :returns: Object
    """

    try:
        specs = [(int(d), int(k)) for d, k in specs]
    except (TypeError, ValueError) as e:
        raise InvalidLayoutError(
            "Layers must be (copies, users) pairs: {}".format(e)
        )
    if not specs:
        raise InvalidLayoutError("A layout needs at least one layer")
    if any(d < 1 or k < 1 for d, k in specs):
        raise InvalidLayoutError(
            "Copies and users must be positive: {}".format(specs)
        )

    products = {d * k for d, k in specs}
    if len(products) != 1:
        raise InvalidLayoutError(
            "Layers do not share a common L = D * K: {}".format(specs)
        )

    copies = [d for d, _ in specs]
    if any(a < b for a, b in zip(copies, copies[1:])):
        raise InvalidLayoutError(
            "Copies must be nonincreasing over layers: {}".format(copies)
        )

    blocks = products.pop()
    n_layers = len(specs)
    layers = list()
    assignment = dict()
    user = 0
    for b, (d, k) in enumerate(specs, start=1):
        layers.append(
            LayerSpec(index=b, copies=d, users=k, interferers=n_layers - b)
        )
        for j in range(k):
            assignment[user] = (tuple(range(j * d, (j + 1) * d)), b)
            user += 1

    return FrameLayout(
        blocks=blocks, layers=tuple(layers), assignment=assignment
    )


def build_layout(blocks, n_layers):
    """Build the dyadic layout: layer b has 2^(b-1) users of L/2^(b-1) copies.

    :param blocks: Number of blocks L.
    :type blocks: Integer
    :param n_layers: Number of layers B.
    :type n_layers: Integer
    :returns: Object
    """

    if blocks < 1 or n_layers < 1:
        raise InvalidLayoutError("L and B must be positive")
    if blocks % (2 ** (n_layers - 1)):
        raise InvalidLayoutError(
            "L = {} is not divisible by 2^(B-1) = {}".format(
                blocks, 2 ** (n_layers - 1)
            )
        )

    return build_layout_custom(
        [
            (blocks // 2 ** (b - 1), 2 ** (b - 1))
            for b in range(1, n_layers + 1)
        ]
    )


def layout_to_dict(layout):
    """Return the {L, layers: [{D, K}]} document for a layout."""

    return {
        "L": layout.blocks,
        "layers": [{"D": i.copies, "K": i.users} for i in layout.layers],
    }


def layout_from_dict(document):
    """Rebuild a layout from its document form, validating L."""

    try:
        specs = [(i["D"], i["K"]) for i in document["layers"]]
    except (KeyError, TypeError) as e:
        raise InvalidLayoutError("Malformed layout document: {}".format(e))

    layout = build_layout_custom(specs)
    try:
        declared = int(document.get("L", layout.blocks))
    except (TypeError, ValueError) as e:
        raise InvalidLayoutError("Malformed layout L: {}".format(e))
    if declared != layout.blocks:
        raise InvalidLayoutError(
            "Layout declares L = {} but layers give {}".format(
                declared, layout.blocks
            )
        )

    return layout


def complex_gaussian(generator, shape, variance=1.0):
    """Draw circularly symmetric complex Gaussians with the given variance."""

    scale = math.sqrt(variance / 2.0)
    return scale * (
        generator.standard_normal(shape)
        + 1j * generator.standard_normal(shape)
    )


def draw_channel(layout, snr, seed, trial):
    """Draw one frame of Rayleigh block-fading gains.

    The draw is a pure function of (seed, trial). Power is normalized so
    that P = sigma_h^2 = 1 and N0 = 1 / snr.

    :param layout: Frame layout.
    :type layout: Object
    :param snr: Linear SNR.
    :type snr: Float
    :param seed: User seed.
    :type seed: Integer
    :param trial: Trial index.
    :type trial: Integer
    :returns: Object
    """

    if not snr > 0:
        raise DomainError("snr must be positive, got %r" % snr)

    generator = noma_rep.stream_generator(seed, noma_rep.STREAM_CHANNEL, trial)
    return ChannelDraw(
        gains=complex_gaussian(generator, (layout.blocks, layout.n_users)),
        variance=1.0,
        noise_power=1.0 / snr,
        signal_power=1.0,
    )


def draw_channels(layout, snr, seed, trials):
    """Stack draw_channel over trial indices.

    The returned gains carry a leading trial axis; row i is exactly the
    draw_channel gains of trials[i].

    :param layout: Frame layout.
    :type layout: Object
    :param snr: Linear SNR.
    :type snr: Float
    :param seed: User seed.
    :type seed: Integer
    :param trials: Trial indices.
    :type trials: List
    :returns: Object
    """

    draws = [draw_channel(layout, snr, seed, trial) for trial in trials]
    if not draws:
        raise DomainError("At least one trial is needed")

    return ChannelDraw(
        gains=np.stack([i.gains for i in draws]),
        variance=draws[0].variance,
        noise_power=draws[0].noise_power,
        signal_power=draws[0].signal_power,
    )


def qpsk_modulate(bits):
    """Gray-mapped unit-energy QPSK.

    Bit pairs (b0, b1) map to ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2), so 00
    is (1 + j) / sqrt(2) and neighbouring points differ in one bit.

    :param bits: Sequence of 0/1 values of even length.
    :type bits: List
    :returns: Array
    """

    bits = np.asarray(bits, dtype=np.int8)
    if bits.shape[-1] % 2:
        raise DomainError("QPSK needs an even number of bits")

    pairs = bits.reshape(bits.shape[:-1] + (bits.shape[-1] // 2, 2))
    return ((1 - 2 * pairs[..., 0]) + 1j * (1 - 2 * pairs[..., 1])) / (
        math.sqrt(2.0)
    )


def qpsk_demodulate(symbols):
    """Hard-decision inverse of qpsk_modulate."""

    symbols = np.asarray(symbols)
    pairs = np.stack(
        [(symbols.real < 0), (symbols.imag < 0)], axis=-1
    ).astype(np.int8)
    return pairs.reshape(symbols.shape[:-1] + (-1,))


def make_interleaver(length, seed, block, user):
    """Return the random interleaver of copy `block` of user `user`.

    :param length: Number of symbols S.
    :type length: Integer
    :param seed: User seed.
    :type seed: Integer
    :param block: Copy (block) index l.
    :type block: Integer
    :param user: User index k.
    :type user: Integer
    :returns: Object
    """

    if length < 1:
        raise DomainError("Interleaver length must be >= 1")

    generator = noma_rep.stream_generator(
        seed, noma_rep.STREAM_INTERLEAVER, block, user
    )
    return Interleaver(permutation=generator.permutation(int(length)))
