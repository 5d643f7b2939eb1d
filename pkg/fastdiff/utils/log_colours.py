#!/usr/bin/env python3
import os

END_FORMATTING = '\033[0m'
RED = '\033[31m'
GREEN = '\033[32m'
CYAN = '\u001b[36m'
DIM = '\033[2m'

def _paint(code, text):
    # https://no-color.org
    if os.getenv("NO_COLOR"):
        return text
    return code + text + END_FORMATTING

def red(text):
    return _paint(RED, text)

def cyan(text):
    return _paint(CYAN, text)

def green(text):
    return _paint(GREEN, text)

def dim(text):
    return _paint(DIM, text)

def check_mark(passed):
    """Coloured PASS/FAIL tag for invariant summaries."""
    if passed is None:
        return dim("n/a ")
    return green("PASS") if passed else red("FAIL")
