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

import logging
import sys
import unittest

from unittest.mock import patch

from noma_rep import logger
from noma_rep import tests


class TestLoggerHandlers(unittest.TestCase):
    def setUp(self):
        self.rh_patched = unittest.mock.patch(
            "noma_rep.logger.handlers.RotatingFileHandler"
        )
        self.rh = self.rh_patched.start()

        self.sh_patched = unittest.mock.patch(
            "noma_rep.logger.logging.StreamHandler"
        )
        self.sh = self.sh_patched.start()

        self.log = logger.LogSetup()

        self._log = unittest.mock.Mock()
        self._handler = unittest.mock.Mock()

    def tearDown(self):
        self.rh_patched.stop()
        self.sh_patched.stop()
        logging.getLogger("testLogger").handlers.clear()
        logging.getLogger("test_log").handlers.clear()

    def test_getlogger_new_logger(self):
        log = logger.getLogger(name="testLogger")
        self.assertTrue(log.handlers)
        self.assertTrue(self.sh.called)
        self.sh.assert_called_with(sys.stderr)

    def test_getlogger_dotted_name_shares_root(self):
        log = logger.getLogger(name="testLogger.child")
        self.assertEqual(log.name, "testLogger")

    def test_getlogger_debug_promotes(self):
        handler = unittest.mock.Mock()
        handler.name = "testLogger"
        log = logging.getLogger("testLogger")
        log.handlers.append(handler)
        returned = logger.getLogger(name="testLogger", debug_logging=True)
        self.assertIs(returned, log)
        handler.setLevel.assert_called_with(logging.DEBUG)
        self.assertEqual(log.level, logging.DEBUG)

    def test_getlogger_log_file(self):
        logger.getLogger(name="testLogger", log_file="/tmp/test.log")
        self.rh.assert_called_once_with(
            filename="/tmp/test.log",
            maxBytes=50 * 1024 * 1024,
            backupCount=5,
        )
        self.rh.return_value.setLevel.assert_called_with(logging.INFO)

    def test_getlogger_debug_log_file(self):
        log = logger.getLogger(
            name="testLogger", debug_logging=True, log_file="/tmp/test.log"
        )
        self.assertEqual(log.level, logging.DEBUG)
        self.rh.return_value.setLevel.assert_called_with(logging.DEBUG)
        self.sh.return_value.setLevel.assert_called_with(logging.DEBUG)

    def test_getlogger_without_log_file(self):
        log = logger.getLogger(name="testLogger")
        self.assertFalse(self.rh.called)
        self.assertEqual(log.level, logging.INFO)

    def test_logger_file_format_has_time(self):
        self.log.default_logger(
            name="test_log", enable_file=True, enable_stream=False
        )
        self.assertIn("asctime", self.log.format._fmt)
        self.rh.return_value.setFormatter.assert_called_with(self.log.format)

    def test_logger_stream_format(self):
        self.log.default_logger(
            name="test_log", enable_file=False, enable_stream=True
        )
        self.assertEqual(self.log.format._fmt, "%(levelname)s %(message)s")
        self.assertEqual(self.sh.return_value.name, "test_log")

    def test_logger_enable_file(self):
        self.log.default_logger(
            name="test_log", enable_file=True, enable_stream=False
        )
        self.assertTrue(self.rh.called)
        self.assertFalse(self.sh.called)

    def test_logger_enable_stream(self):
        self.log.default_logger(
            name="test_log", enable_file=False, enable_stream=True
        )
        self.assertFalse(self.rh.called)
        self.assertTrue(self.sh.called)

    def test_logger_set_handler(self):
        self.log.set_handler(log=self._log, handler=self._handler)
        self.assertTrue(self._log.setLevel.called)
        self.assertTrue(self._handler.setFormatter.called)
        self.assertTrue(self._log.addHandler.called)

    def test_level(self):
        self.assertEqual(self.log.level, logging.INFO)
        self.assertEqual(
            logger.LogSetup(debug_logging=True).level, logging.DEBUG
        )

    def test_return_logfile_absolute(self):
        self.assertEqual(
            self.log.return_logfile(filename="/data/run.log"),
            "/data/run.log",
        )

    def test_return_logfile_dir_missing(self):
        with patch("os.path.expanduser", autospec=True) as mock_expanduser:
            mock_expanduser.return_value = "/test/home/path"
            log_file = self.log.return_logfile(
                filename="test.log", log_dir="/not/a/path"
            )
        self.assertEqual(log_file, "/test/home/path/test.log")

    def test_return_logfile_path_user_writable(self):
        with patch("os.stat", autospec=True) as mock_stat:
            mock_stat.return_value = tests.FakeStat(uid=9998, gid=9999)
            with patch("os.path.isdir", autospec=True) as mock_isdir:
                mock_isdir.return_value = True
                with patch("os.getuid", autospec=True) as mock_uid:
                    mock_uid.return_value = 9998
                    log_file = self.log.return_logfile(
                        filename="test.log", log_dir="/not/a/path"
                    )
        self.assertEqual(log_file, "/not/a/path/test.log")

    def test_return_logfile_path_not_owned(self):
        with patch("os.stat", autospec=True) as mock_stat:
            mock_stat.return_value = tests.FakeStat(uid=9998, gid=9999)
            with patch("os.path.expanduser", autospec=True) as mock_home:
                mock_home.return_value = "/test/home/path"
                with patch("os.path.isdir", autospec=True) as mock_isdir:
                    mock_isdir.return_value = True
                    with patch("os.getuid", autospec=True) as mock_uid:
                        mock_uid.return_value = 1000
                        log_file = self.log.return_logfile(
                            filename="test.log", log_dir="/not/a/path"
                        )
        self.assertEqual(log_file, "/test/home/path/test.log")
