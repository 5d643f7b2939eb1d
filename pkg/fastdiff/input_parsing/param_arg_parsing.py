#!/usr/bin/env python3
from fastdiff.utils.log_colours import cyan
from fastdiff.utils import misc
from fastdiff.utils.config import *
from fastdiff.analysis_functions.params import ParamSet

import sys

REQUIRED = [KEY_N,KEY_M,KEY_RHO1,KEY_BETA]

def check_required_params(config):
    missing = [key for key in REQUIRED if config[key] is None]
    if len(missing)==1:
        key = missing[0]
        sys.stderr.write(cyan(f'Error: missing required parameter `{key}`.')+f'\nSet it with `--{key}` or as `{key}:` in the config file.\n')
        sys.exit(EXIT_USAGE)
    elif missing:
        params = ""
        for key in missing:
            params += f"\t- {key}\n"
        sys.stderr.write(cyan(f'Error: missing required parameters.\n')+params)
        sys.exit(EXIT_USAGE)

def param_group_parsing(n,m,rho1,beta,lam,config):
    misc.add_arg_to_config(KEY_N,n,config)
    misc.add_arg_to_config(KEY_M,m,config)
    misc.add_arg_to_config(KEY_RHO1,rho1,config)
    misc.add_arg_to_config(KEY_BETA,beta,config)
    misc.add_arg_to_config(KEY_LAMBDA,lam,config)

    check_required_params(config)

    config[KEY_N] = misc.int_or_exit(KEY_N,config[KEY_N],"--n")
    for key in [KEY_M,KEY_RHO1,KEY_BETA,KEY_LAMBDA]:
        config[key] = misc.float_or_exit(key,config[key],f"--{key}")

def params_from_config(config):
    return ParamSet(config[KEY_N],config[KEY_M],config[KEY_RHO1],config[KEY_BETA],config[KEY_LAMBDA])
