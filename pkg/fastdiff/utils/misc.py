#!/usr/bin/env python3
import os
import sys

from fastdiff.utils.log_colours import green,cyan
from fastdiff.utils.config import *

def add_arg_to_config(key,arg,config):
    if arg is not None and arg is not False:
        config[key] = arg

def add_path_to_config(key,arg,config):
    if arg:
        expanded_path = os.path.expanduser(arg)
        path_to_cwd = os.path.abspath(config[KEY_CWD])
        full_path = os.path.join(path_to_cwd,expanded_path)
        config[key]=full_path

def float_or_exit(key,value,flag):
    try:
        return float(value)
    except (TypeError,ValueError):
        sys.stderr.write(cyan(f'Error: `{flag}` must be a number, got `{value}`.\n'))
        sys.exit(EXIT_USAGE)

def int_or_exit(key,value,flag):
    try:
        as_float = float(value)
        as_int = int(as_float)
    except (TypeError,ValueError):
        sys.stderr.write(cyan(f'Error: `{flag}` must be an integer, got `{value}`.\n'))
        sys.exit(EXIT_USAGE)
    if as_int != as_float:
        sys.stderr.write(cyan(f'Error: `{flag}` must be an integer, got `{value}`.\n'))
        sys.exit(EXIT_USAGE)
    return as_int

def choice_or_exit(key,value,choices,flag):
    if value not in choices:
        options = ", ".join(choices)
        sys.stderr.write(cyan(f'Error: `{flag}` must be one of {options}, got `{value}`.\n'))
        sys.exit(EXIT_USAGE)
    return value

def pair_or_exit(key,value,flag):
    """Parse a two-number range such as `0.5,2` or a yaml list."""
    if isinstance(value,str):
        value = value.split(",")
    try:
        lo,hi = [float(i) for i in value]
    except (TypeError,ValueError):
        sys.stderr.write(cyan(f'Error: `{flag}` must be two comma separated numbers, got `{value}`.\n'))
        sys.exit(EXIT_USAGE)
    if not lo < hi:
        sys.stderr.write(cyan(f'Error: `{flag}` lower end must be below the upper end, got `{value}`.\n'))
        sys.exit(EXIT_USAGE)
    return [lo,hi]

def worker_count(threads):
    cap = os.getenv(ENV_MAX_WORKERS)
    workers = max(1,int(threads))
    if cap:
        try:
            workers = min(workers,max(1,int(cap)))
        except ValueError:
            sys.stderr.write(cyan(f'Error: {ENV_MAX_WORKERS} must be an integer, got `{cap}`.\n'))
            sys.exit(EXIT_USAGE)
    return workers

def header(v):
    print(green(r"""
                     ___              __      __  _  ___  ___
                    / _/__ ____ ___  / /_ ___/ / (_)/ _/ / _/
                   / _/ _ `(_-</ _ \/ __// _  / / // _/ / _/
                  /_/ \_,_/___/\__/\__/ \_,_/ /_//_/  /_/

           **** Self-similar profiles of the fast diffusion equation ****
                """)+green(f"""
                                        {v}""")+green("""
                        ****************************************
\n"""))

def preamble(v):
    header(v)
