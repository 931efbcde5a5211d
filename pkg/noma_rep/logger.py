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
import os
import sys

from logging import handlers


def getLogger(name, debug_logging=False, log_file=None):
    """Return the named logger, installing handlers on first use.

    Handlers are keyed on the root of the dotted name so every module in the
    package shares one stream handler (and one optional rotating file).
    Asking again with `debug_logging` set promotes an existing logger to
    DEBUG.

    :param name: Logger name, usually "noma_rep".
    :type name: String
    :param debug_logging: Enable | Disable debug logging.
    :type debug_logging: Boolean
    :param log_file: Optional file name; enables the rotating file handler.
    :type log_file: String
    :returns: Object
    """

    root_name = name.split(".")[0]
    log = logging.getLogger(name=root_name)
    for handler in log.handlers:
        if handler.name == root_name:
            if debug_logging:
                handler.setLevel(logging.DEBUG)
                log.setLevel(logging.DEBUG)
            return log
    else:
        return LogSetup(debug_logging=debug_logging).default_logger(
            name=root_name,
            enable_file=bool(log_file),
            log_file=log_file,
        )


class LogSetup:
    """Logging Class."""

    def __init__(self, max_size=50, max_backup=5, debug_logging=False):
        """Setup Logging.

        :param max_size: Set max log file size in MiB.
        :type max_size: Integer
        :param max_backup: Set max log file back rotations.
        :type max_backup: Integer
        :param debug_logging: Enable | Disable debug logging.
        :type debug_logging: Boolean
        """

        self.max_size = max_size * 1024 * 1024
        self.max_backup = max_backup
        self.debug_logging = debug_logging
        self.format = None
        self.name = None
        self.enable_file = False

    @property
    def level(self):
        """Return the level handlers are set to."""

        return logging.DEBUG if self.debug_logging else logging.INFO

    def default_logger(
        self,
        name=__name__,
        enable_stream=True,
        enable_file=False,
        log_file=None,
    ):
        """Return a logger with a stream handler and optional file handler.

        :param name: Log handler name to retrieve.
        :type name: String
        :param enable_stream: Enable | Disable log Streaming.
        :type enable_stream: Boolean
        :param enable_file: Enable | Disable log writting to a file.
        :type enable_file: Boolean
        :param log_file: File name for the rotating handler.
        :type log_file: String
        :returns: Object
        """

        log = logging.getLogger(name)
        self.name = name

        if enable_file:
            self.enable_file = True
            file_handler = handlers.RotatingFileHandler(
                filename=self.return_logfile(
                    filename=log_file or "{}.log".format(name)
                ),
                maxBytes=self.max_size,
                backupCount=self.max_backup,
            )
            self.set_handler(log, handler=file_handler)

        # stdout carries CSV and plan documents.
        if enable_stream:
            self.set_handler(log, handler=logging.StreamHandler(sys.stderr))

        return log

    def set_handler(self, log, handler):
        """Set the logging level as well as the handlers.

        :param log: Logging object.
        :type log: Object
        :param handler: Log handler object.
        :type handler: Object
        """

        log.setLevel(self.level)
        handler.setLevel(self.level)
        handler.name = self.name

        if not self.format:
            if self.enable_file:
                self.format = logging.Formatter(
                    "%(asctime)s %(levelname)s %(message)s"
                )
            else:
                self.format = logging.Formatter("%(levelname)s %(message)s")

        handler.setFormatter(self.format)
        log.addHandler(handler)

    @staticmethod
    def return_logfile(filename, log_dir="/var/log/noma_rep"):
        """Return a path for logging file.

        Absolute file names are used as given. Otherwise the file goes to
        `log_dir` when the executing user owns it, falling back to the
        user's home folder.

        :param filename: File name to write log messages.
        :type filename: String
        :param log_dir: Directory where the log file will be stored.
        :type log_dir: String
        :returns: String
        """

        if os.path.isabs(filename):
            return filename

        user = os.getuid()
        home = os.path.expanduser("~")

        if not os.path.isdir(log_dir):
            return os.path.join(home, filename)

        log_dir_stat = os.stat(log_dir)
        if user in (log_dir_stat.st_uid, log_dir_stat.st_gid):
            return os.path.join(log_dir, filename)

        return os.path.join(home, filename)
