#!/usr/bin/env python3
"""
Console and file logging for fastdiff runs.

The stream handler follows the colourising handler that snakemake ships
(Johannes Köster, MIT licence); the message-dict dispatch of `Logger` keeps
the same shape so handlers can be stacked.
"""

import logging as _logging
import platform
import sys
import os
import threading


class ColorizingStreamHandler(_logging.StreamHandler):

    BLACK, RED, GREEN, YELLOW, BLUE, MAGENTA, CYAN, WHITE = range(8)
    RESET_SEQ = "\033[0m"
    COLOR_SEQ = "\033[%dm"
    BOLD_SEQ = "\033[1m"

    colors = {
        "WARNING": YELLOW,
        "INFO": GREEN,
        "DEBUG": BLUE,
        "CRITICAL": RED,
        "ERROR": RED,
    }

    def __init__(self, nocolor=False, stream=sys.stderr):
        super().__init__(stream=stream)

        self._output_lock = threading.Lock()

        self.nocolor = nocolor or not self.can_color_tty()

    def can_color_tty(self):
        if "TERM" in os.environ and os.environ["TERM"] == "dumb":
            return False
        if os.getenv("NO_COLOR"):
            return False
        return self.is_tty and not platform.system() == "Windows"

    @property
    def is_tty(self):
        isatty = getattr(self.stream, "isatty", None)
        return bool(isatty and isatty())

    def emit(self, record):
        with self._output_lock:
            try:
                self.format(record)  # add the message to the record
                self.stream.write(self.decorate(record))
                self.stream.write(getattr(self, "terminator", "\n"))
                self.flush()
            except BrokenPipeError:
                pass
            except (KeyboardInterrupt, SystemExit):
                # relevant messages have been printed before
                pass
            except Exception:
                self.handleError(record)

    def decorate(self, record):
        message = [record.message]
        if not self.nocolor and record.levelname in self.colors:
            message.insert(0, self.COLOR_SEQ % (30 + self.colors[record.levelname]))
            message.append(self.RESET_SEQ)
        return "".join(message)


class Logger:
    def __init__(self):
        self.logger = _logging.getLogger("fastdiff")
        self.logger.propagate = False
        self.log_handler = [self.text_handler]
        self.stream_handler = None
        self.logfile = None
        self.logfile_handler = None
        self.quiet = False

    def setup_logfile(self, outdir, name="fastdiff.log"):
        self.cleanup()
        os.makedirs(outdir, exist_ok=True)
        self.logfile = os.path.abspath(os.path.join(outdir, name))
        self.logfile_handler = _logging.FileHandler(self.logfile, mode="w")
        self.logfile_handler.setFormatter(
            _logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
        self.logger.addHandler(self.logfile_handler)

    def cleanup(self):
        if self.logfile_handler is not None:
            self.logger.removeHandler(self.logfile_handler)
            self.logfile_handler.close()
            self.logfile_handler = None
        self.log_handler = [self.text_handler]

    def handler(self, msg):
        for handler in self.log_handler:
            handler(msg)

    def set_stream_handler(self, stream_handler):
        if self.stream_handler is not None:
            self.logger.removeHandler(self.stream_handler)
        self.stream_handler = stream_handler
        self.logger.addHandler(stream_handler)

    def set_level(self, level):
        self.logger.setLevel(level)

    def info(self, msg):
        self.handler(dict(level="info", msg=msg))

    def warning(self, msg):
        self.handler(dict(level="warning", msg=msg))

    def debug(self, msg):
        self.handler(dict(level="debug", msg=msg))

    def error(self, msg):
        self.handler(dict(level="error", msg=msg))

    def progress(self, done=None, total=None, what="steps"):
        self.handler(dict(level="progress", done=done, total=total, what=what))

    def text_handler(self, msg):
        """Default handler: route a message dict onto the stdlib logger."""
        level = msg["level"]
        if level == "progress":
            done, total = msg["done"], msg["total"]
            percent = 100 * done // total if total else 100
            self.logger.info("{} of {} {} ({}%) done".format(done, total, msg["what"], percent))
        elif level == "error":
            self.logger.error(msg["msg"])
        elif level == "warning":
            self.logger.warning(msg["msg"])
        elif level == "debug":
            self.logger.debug(msg["msg"])
        else:
            self.logger.info(msg["msg"])


logger = Logger()


def setup_logger(handler=[], quiet=True, nocolor=False, stdout=False, debug=False):
    logger.log_handler.extend(handler)

    stream_handler = ColorizingStreamHandler(
        nocolor=nocolor,
        stream=sys.stdout if stdout else sys.stderr,
    )
    # quiet only silences the console, the logfile keeps everything
    stream_handler.setLevel(_logging.WARNING if quiet else _logging.DEBUG)
    logger.set_stream_handler(stream_handler)

    logger.set_level(_logging.DEBUG if debug else _logging.INFO)
    logger.quiet = quiet
