#!/usr/bin/env python3
from fastdiff.utils.log_colours import cyan
from fastdiff.utils import misc
from fastdiff.utils.config import *

import sys

def check_positive(key,config,flag):
    if config[key] is not None and not config[key] > 0:
        sys.stderr.write(cyan(f'Error: `{flag}` must be positive, got `{config[key]}`.\n'))
        sys.exit(EXIT_USAGE)

def optional_float(key,config,flag):
    if config[key] is not None:
        config[key] = misc.float_or_exit(key,config[key],flag)

def solver_group_parsing(r_max,s_min,tol,xi0,nodes,start,method,config):
    """
    Options shared by `profile` and `asympt`.
    """
    misc.add_arg_to_config(KEY_R_MAX,r_max,config)
    misc.add_arg_to_config(KEY_S_MIN,s_min,config)
    misc.add_arg_to_config(KEY_TOL,tol,config)
    misc.add_arg_to_config(KEY_XI0,xi0,config)
    misc.add_arg_to_config(KEY_NODES,nodes,config)
    misc.add_arg_to_config(KEY_START,start,config)
    misc.add_arg_to_config(KEY_METHOD,method,config)

    config[KEY_R_MAX] = misc.float_or_exit(KEY_R_MAX,config[KEY_R_MAX],"--r-max")
    config[KEY_TOL] = misc.float_or_exit(KEY_TOL,config[KEY_TOL],"--tol")
    optional_float(KEY_S_MIN,config,"--s-min")
    optional_float(KEY_XI0,config,"--xi0")
    config[KEY_NODES] = misc.int_or_exit(KEY_NODES,config[KEY_NODES],"--nodes")
    for key,flag in [(KEY_R_MAX,"--r-max"),(KEY_TOL,"--tol"),(KEY_XI0,"--xi0")]:
        check_positive(key,config,flag)
    if config[KEY_NODES] < 3:
        sys.stderr.write(cyan(f'Error: `--nodes` must be at least 3.\n'))
        sys.exit(EXIT_USAGE)
    misc.choice_or_exit(KEY_START,config[KEY_START],START_MODES,"--start")
    misc.choice_or_exit(KEY_METHOD,config[KEY_METHOD],METHODS,"--method")

def profile_group_parsing(kind,invert,config):
    misc.add_arg_to_config(KEY_KIND,kind,config)
    misc.add_arg_to_config(KEY_INVERT,invert,config)
    misc.choice_or_exit(KEY_KIND,config[KEY_KIND],PROFILE_KINDS,"--kind")
    config[KEY_INVERT] = bool(config[KEY_INVERT])

def asympt_group_parsing(kind,lambda2,s_max,window,synthetic_b,require_second_order,config):
    misc.add_arg_to_config(KEY_KIND,kind,config)
    misc.add_arg_to_config(KEY_LAMBDA2,lambda2,config)
    misc.add_arg_to_config(KEY_S_MAX,s_max,config)
    misc.add_arg_to_config(KEY_WINDOW,window,config)
    misc.add_arg_to_config(KEY_SYNTHETIC_B,synthetic_b,config)
    misc.add_arg_to_config(KEY_REQUIRE_SECOND_ORDER,require_second_order,config)

    misc.choice_or_exit(KEY_KIND,config[KEY_KIND],ASYMPT_KINDS,"--kind")
    config[KEY_LAMBDA2] = misc.float_or_exit(KEY_LAMBDA2,config[KEY_LAMBDA2],"--lambda2")
    check_positive(KEY_LAMBDA2,config,"--lambda2")
    optional_float(KEY_S_MAX,config,"--s-max")
    config[KEY_SYNTHETIC_B] = misc.float_or_exit(KEY_SYNTHETIC_B,config[KEY_SYNTHETIC_B],"--synthetic-b")
    if config[KEY_WINDOW] is not None:
        config[KEY_WINDOW] = misc.pair_or_exit(KEY_WINDOW,config[KEY_WINDOW],"--window")
    config[KEY_REQUIRE_SECOND_ORDER] = bool(config[KEY_REQUIRE_SECOND_ORDER])
