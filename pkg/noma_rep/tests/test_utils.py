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

import io
import os
import tempfile
import unittest

from unittest.mock import patch

from noma_rep import ConfigError
from noma_rep import DomainError
from noma_rep import meta
from noma_rep import tests
from noma_rep import utils


class TestUtils(tests.TestBase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def _write(self, name, content):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as f:
            f.write(content)

        return path

    def test_dump_yaml(self):
        m = unittest.mock.mock_open()
        with patch("builtins.open", m):
            file_path = utils.dump_yaml(
                file_path="/test.yaml", data={"test": "data"}
            )
        m.assert_called_once_with("/test.yaml", "w")
        self.assertEqual(file_path, "/test.yaml")

    def test_load_yaml(self):
        data = utils.load_yaml(self._write("run.yaml", tests.TEST_CONFIG))
        self.assertEqual(data["defaults"], {"seed": 7, "trials": 2000})
        self.assertEqual(data["moment_check"]["pairs"], [[2, 1]])

    def test_load_yaml_empty(self):
        self.assertEqual(utils.load_yaml(self._write("e.yaml", "")), {})

    def test_load_yaml_broken(self):
        path = self._write("broken.yaml", tests.BROKEN_CONFIG)
        with self.assertRaises(ConfigError) as ctx:
            utils.load_yaml(path)
        self.assertIn("line", str(ctx.exception))
        self.assertGreaterEqual(ctx.exception.lineno, 1)

    def test_load_yaml_not_mapping(self):
        path = self._write("list.yaml", "- 1\n- 2\n")
        with self.assertRaises(ConfigError):
            utils.load_yaml(path)

    def test_load_yaml_missing(self):
        with self.assertRaises(ConfigError):
            utils.load_yaml(os.path.join(self.tmp.name, "nope.yaml"))

    def test_merge_dict_extend(self):
        a = {
            "dict": {"a": "test", "b": {"int1": 1}},
            "list": ["a"],
            "str": "a",
            "int": 1,
        }
        b = {
            "dict": {"b": {"int2": 2}, "c": "test2"},
            "list": ["b"],
            "key": "value",
        }
        merge = {
            "dict": {"a": "test", "b": {"int1": 1, "int2": 2}, "c": "test2"},
            "int": 1,
            "key": "value",
            "list": ["a", "b"],
            "str": "a",
        }
        new = utils.merge_dict(base=a, new=b)
        self.assertEqual(new, merge)

    def test_merge_dict_no_extend(self):
        a = {
            "dict": {"a": "test", "b": {"int1": 1}},
            "list": ["a"],
            "str": "a",
            "int": 1,
        }
        b = {
            "dict": {"b": {"int2": 2}, "c": "test2"},
            "list": ["b"],
            "key": "value",
        }
        merge = {
            "dict": {"b": {"int2": 2}, "c": "test2"},
            "int": 1,
            "key": "value",
            "list": ["b"],
            "str": "a",
        }

        new = utils.merge_dict(base=a, new=b, extend=False)
        self.assertEqual(new, merge)

    def test_merge_dict_list_extend(self):
        self.assertEqual(utils.merge_dict(base=["a"], new=["b"]), ["a", "b"])

    def test_merge_dict_list_no_extend(self):
        self.assertEqual(
            utils.merge_dict(base=["a"], new=["b"], extend=False), ["b"]
        )

    def test_command_config(self):
        document = {
            "defaults": {"seed": 7, "snr_db": [0.0, 3.0]},
            "outage_sweep": {"snr_db": [6.0]},
        }
        config = utils.command_config(document, "outage-sweep")
        self.assertEqual(config, {"seed": 7, "snr_db": [6.0]})
        self.assertEqual(document["defaults"]["snr_db"], [0.0, 3.0])

    def test_command_config_defaults_only(self):
        config = utils.command_config({"defaults": {"seed": 3}}, "plan")
        self.assertEqual(config, {"seed": 3})

    def test_command_config_not_mapping(self):
        with self.assertRaises(ConfigError):
            utils.command_config({"plan": [1, 2]}, "plan")

    def test_object_sha3_224(self):
        first = utils.object_sha3_224(obj={"a": 1, "b": [1, 2]})
        second = utils.object_sha3_224(obj={"b": [1, 2], "a": 1})
        self.assertEqual(first, second)
        self.assertEqual(len(first), 56)
        self.assertNotEqual(first, utils.object_sha3_224(obj={"a": 2}))

    def test_db_conversions(self):
        self.assertClose(utils.db_to_linear(10.0), 10.0)
        self.assertClose(utils.db_to_linear(6.0), tests.SNR_6DB)
        self.assertClose(utils.linear_to_db(100.0), 20.0)
        with self.assertRaises(DomainError):
            utils.linear_to_db(0.0)

    def test_format_value(self):
        self.assertEqual(utils.format_value(None), "")
        self.assertEqual(utils.format_value(True), "true")
        self.assertEqual(utils.format_value(0.1), "0.1")
        self.assertEqual(utils.format_value(3), "3")
        self.assertEqual(utils.format_value("dyadic"), "dyadic")


class TestCsvWriter(tests.TestBase):
    def test_write_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "out.csv")
            with utils.CsvWriter(
                path, ["a", "b"], seed=1, trials=1000, config={"x": 1}
            ) as writer:
                writer.writerow({"a": 1, "b": 0.5})
                writer.writerow({"a": 2})
            with open(path) as f:
                lines = f.read().splitlines()

        self.assertEqual(writer.rows, 2)
        self.assertEqual(
            lines[0],
            "# noma-rep {} seed=1 trials=1000 config={}".format(
                meta.__version__, utils.object_sha3_224({"x": 1})
            ),
        )
        self.assertEqual(lines[1:], ["a,b", "1,0.5", "2,"])

    def test_write_stdout(self):
        with patch("sys.stdout", new_callable=io.StringIO) as stdout:
            with utils.CsvWriter(
                None, ["a"], seed=1, trials=1000, config={}
            ) as writer:
                writer.writerow({"a": "x"})
        self.assertTrue(stdout.getvalue().startswith("# noma-rep "))
        self.assertTrue(stdout.getvalue().endswith("a\nx\n"))

    def test_unknown_column(self):
        with patch("sys.stdout", new_callable=io.StringIO):
            with utils.CsvWriter(
                None, ["a"], seed=1, trials=1000, config={}
            ) as writer:
                with self.assertRaises(KeyError):
                    writer.writerow({"z": 1})

    def test_print_tabulated_data(self):
        with patch("builtins.print") as mock_print:
            utils.print_tabulated_data([["1", "2"]], headers=["a", "b"])
        self.assertTrue(mock_print.called)
