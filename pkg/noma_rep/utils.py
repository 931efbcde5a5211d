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

import csv
import hashlib
import json
import math
import os
import sys

import tabulate
import yaml

from noma_rep import ConfigError
from noma_rep import DomainError
from noma_rep import logger
from noma_rep import meta


def dump_yaml(file_path, data):
    """Dump data to a file.

    :param file_path: File path to dump data to
    :type file_path: String
    :param data: Dictionary|List data to dump
    :type data: Dictionary|List
    """

    with open(os.path.abspath(os.path.expanduser(file_path)), "w") as f:
        yaml.safe_dump(data, f, default_flow_style=False)

    return file_path


def load_yaml(file_path):
    """Load a YAML experiment file.

    Parse failures are raised as ConfigError carrying the line and column
    of the offending token.

    :param file_path: File path to load.
    :type file_path: String
    :returns: Dictionary
    """

    path = os.path.abspath(os.path.expanduser(file_path))
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError("Config file [ {} ] not found".format(path))
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        error = ConfigError(
            "{} at line {}, column {}: {}".format(
                path,
                mark.line + 1 if mark else "?",
                mark.column + 1 if mark else "?",
                e.problem or e.context,
            )
        )
        error.filename = path
        if mark:
            error.lineno = mark.line + 1
            error.offset = mark.column + 1
        raise error
    except yaml.YAMLError as e:
        raise ConfigError("{}: {}".format(path, e))

    if data is None:
        return dict()
    if not isinstance(data, dict):
        raise ConfigError(
            "Config file [ {} ] must hold a mapping, got {}".format(
                path, type(data).__name__
            )
        )

    return data


def merge_dict(base, new, extend=True):
    """Recursively merge new into base.

    :param base: Base dictionary to load items into
    :type base: Dictionary
    :param new: New dictionary to merge items from
    :type new: Dictionary
    :param extend: Boolean option to enable or disable extending
                   iterable arrays.
    :type extend: Boolean
    :returns: Dictionary
    """

    if isinstance(new, dict):
        for key, value in new.items():
            if key not in base:
                base[key] = value
            elif extend and isinstance(value, dict):
                base[key] = merge_dict(
                    base=base.get(key, {}), new=value, extend=extend
                )
            elif extend and isinstance(value, list):
                base[key].extend(value)
            else:
                base[key] = new[key]
    elif isinstance(new, list):
        if extend:
            base.extend(new)
        else:
            base = new

    return base


def command_config(document, command):
    """Return the table of one command with `defaults` merged underneath.

    Lists in the command table replace, never extend, the defaults.

    :param document: Parsed config file.
    :type document: Dictionary
    :param command: Command name with dashes or underscores.
    :type command: String
    :returns: Dictionary
    """

    key = command.replace("-", "_")
    defaults = document.get("defaults") or dict()
    table = document.get(key)
    if table is None:
        table = dict()
    if not isinstance(defaults, dict) or not isinstance(table, dict):
        raise ConfigError(
            "Config tables [ defaults ] and [ {} ] must be mappings".format(
                key
            )
        )

    return merge_dict(
        base=json.loads(json.dumps(defaults)), new=table, extend=False
    )


def object_sha3_224(obj):
    """Return the SHA3_224 sum of a given object.

    The object used for generating a SHA3_224 must be JSON compatible.
    Keys are sorted so equal mappings hash equally.

    :param obj: Object to hash.
    :type obj: Dictionary
    :returns: String
    """

    return hashlib.sha3_224(
        json.dumps(obj, sort_keys=True).encode()
    ).hexdigest()


def db_to_linear(value_db):
    """Convert a power ratio from dB."""

    return 10.0 ** (float(value_db) / 10.0)


def linear_to_db(value):
    """Convert a positive power ratio to dB."""

    if not value > 0:
        raise DomainError("Only positive ratios have a dB value")

    return 10.0 * math.log10(value)


def format_value(value):
    """Render a CSV cell; floats use repr so reruns are byte identical."""

    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)

    return str(value)


class CsvWriter:
    """Context manager writing a metadata comment, a header and rows.

    The first line is `# noma-rep <version> seed=<seed> trials=<trials>
    config=<sha3_224>`. Without a path rows go to stdout.
    """

    def __init__(self, path, header, seed, trials, config):
        self.path = path
        self.header = list(header)
        self.seed = seed
        self.trials = trials
        self.config_hash = object_sha3_224(config)
        self.rows = 0
        self._handle = None
        self._writer = None
        self.log = logger.getLogger(name="noma_rep")

    def __enter__(self):
        if self.path:
            self._handle = open(
                os.path.abspath(os.path.expanduser(self.path)),
                "w",
                newline="",
            )
        else:
            self._handle = sys.stdout

        self._handle.write(
            "# noma-rep {} seed={} trials={} config={}\n".format(
                meta.__version__, self.seed, self.trials, self.config_hash
            )
        )
        self._writer = csv.writer(self._handle, lineterminator="\n")
        self._writer.writerow(self.header)
        return self

    def writerow(self, row):
        """Write one row given as a mapping keyed by header names."""

        missing = [i for i in row if i not in self.header]
        if missing:
            raise KeyError("Unknown CSV columns {}".format(missing))

        self._writer.writerow(
            [format_value(row.get(i)) for i in self.header]
        )
        self.rows += 1

    def __exit__(self, *args, **kwargs):
        self._handle.flush()
        if self.path:
            self._handle.close()
            self.log.info(
                "Wrote [ %s ] rows to [ %s ]", self.rows, self.path
            )


def print_tabulated_data(data, headers):
    """Print data in tabulated form.

    :param data: Organized data
    :type data: List
    :param headers: List of headers
    :type headers: List
    """

    print(
        tabulate.tabulate(
            data,
            headers=headers,
            disable_numparse=True,
        )
    )
