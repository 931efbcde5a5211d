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

import math
import os
import unittest


# Long Monte Carlo acceptance runs only execute with NOMA_REP_FULL_TESTS=1.
FULL_TESTS = os.getenv("NOMA_REP_FULL_TESTS", "0") == "1"

SNR_6DB = 10.0**0.6


TEST_CONFIG = """---
defaults:
  seed: 7
  trials: 2000
outage_sweep:
  copies: [2]
  interferers: [0, 1]
  thresholds: [1.0]
  snr_db: [10.0]
fbl_sweep:
  blocks: 4
  n_layers: 2
  rates: [0.5]
  n: [256]
  snr_db: [6.0]
moment_check:
  pairs: [[2, 1]]
plan:
  n_layers: 3
  blocks: 8
  snr_db: 6.0
  eps_target: 0.001
  mode: dyadic
linklevel:
  blocks: 4
  n_layers: 2
  user: 0
  rates: [0.5]
  n: [64]
  snr_db: [6.0]
sic_sim:
  blocks: 4
  n_layers: 2
  thresholds: [0.5, 0.5]
  snr_db: [6.0]
"""


BROKEN_CONFIG = """---
outage_sweep:
  copies: [2
  interferers: [0]
"""


class FakeArgs:
    command = "outage-sweep"
    config = None
    seed = None
    trials = None
    workers = None
    out = None
    log_file = None
    debug = False
    format = None


class FakeStat:
    def __init__(self, uid, gid):
        self.st_uid = uid
        self.st_gid = gid


def fake_args(**kwargs):
    args = FakeArgs()
    for key, value in kwargs.items():
        setattr(args, key, value)

    return args


class TestBase(unittest.TestCase):
    def assertClose(self, first, second, rel=1e-9, abs_tol=0.0, msg=None):
        if not math.isclose(first, second, rel_tol=rel, abs_tol=abs_tol):
            self.fail(
                msg
                or "{!r} != {!r} (rel {}, abs {})".format(
                    first, second, rel, abs_tol
                )
            )

    def assertWithinCi(self, estimate, expected, widths=3.0):
        """The expected value lies within `widths` half widths."""

        slack = widths * max(estimate.halfwidth, 1e-12)
        self.assertLessEqual(
            abs(estimate.p_hat - expected),
            slack,
            "p_hat {} vs {} (slack {})".format(
                estimate.p_hat, expected, slack
            ),
        )
