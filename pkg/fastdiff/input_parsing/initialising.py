import os
import sys
import yaml
from fastdiff.utils.log_colours import green,cyan

import fastdiff.utils.custom_logger as custom_logger
from fastdiff.utils import misc
from fastdiff.utils.config import *

def get_defaults():
    default_dict = {

                    # parameters, n m rho1 beta have to be supplied
                    KEY_N:None,
                    KEY_M:None,
                    KEY_RHO1:None,
                    KEY_BETA:None,
                    KEY_LAMBDA:1.0,
                    KEY_LAMBDA2:2.0,

                    # profile options
                    KEY_KIND:"regular",
                    KEY_R_MAX:1e3,
                    KEY_S_MIN:None,
                    KEY_TOL:1e-8,
                    KEY_XI0:None, # default is 1e-6 of the characteristic radius
                    KEY_NODES:1000,
                    KEY_START:"series",
                    KEY_METHOD:"auto",
                    KEY_INVERT:False,

                    # asymptotics options
                    KEY_S_MAX:None, # default is 100 past the characteristic radius
                    KEY_WINDOW:None, # default is the last 40% of the s-range
                    KEY_SYNTHETIC_B:0.5,
                    KEY_REQUIRE_SECOND_ORDER:False,

                    # simulation options
                    KEY_SCENARIO:"exact_psi",
                    KEY_T:1.0,
                    KEY_CELLS:200,
                    KEY_R_FIRST:1e-2,
                    KEY_R_MIN:None, # punctured runs fall back to r_first
                    KEY_R_OUTER:None, # default covers the rescaled window to the end of the run
                    KEY_BOUNDARY:"dirichlet",
                    KEY_S_END:1.0,
                    KEY_DS:None, # alpha ds = 2.5e-3
                    KEY_Y_MAX:4.0,
                    KEY_Y_CELLS:100,
                    KEY_SNAPSHOT_EVERY:None, # about 100 snapshots per run
                    KEY_COMPACT:None,
                    KEY_MAX_NEWTON:50,
                    KEY_STATIONARY_TOL:0.05,
                    KEY_RATE_TOL:0.15,

                    # perturbation options
                    KEY_BUMP:"box",
                    KEY_AMPLITUDE:0.1,
                    KEY_R_LO:1.0,
                    KEY_R_HI:2.0,
                    KEY_WIDTH:None,
                    KEY_ENVELOPE:[1e-3,1e3],

                    # output options
                    KEY_OUTPUT_PREFIX:"fastdiff",
                    KEY_DATESTAMP:False,
                    KEY_OVERWRITE:False,

                    # misc defaults
                    KEY_SEED:0,
                    KEY_THREADS:1,
                    KEY_VERBOSE:False
                    }
    return default_dict

def check_configfile(cwd,config_arg):
    configfile = os.path.join(cwd,config_arg)

    ending = configfile.split(".")[-1]

    if ending not in ["yaml","yml"]:
        sys.stderr.write(cyan(f'Error: config file {configfile} must be in yaml format.\n'))
        sys.exit(EXIT_USAGE)

    elif not os.path.isfile(configfile):
        sys.stderr.write(cyan(f'Error: cannot find config file at {configfile}\n'))
        sys.exit(EXIT_USAGE)
    else:
        print(green(f"Input config file:") + f" {configfile}")
        return configfile

def arg_dict(config):
    arguments = {
                # parameter args
                "lam":KEY_LAMBDA,
                "lambda1":KEY_LAMBDA,
                "rho_1":KEY_RHO1,

                # profile args
                "r_max":KEY_R_MAX,
                "rmax":KEY_R_MAX,
                "s_min":KEY_S_MIN,
                "xi_0":KEY_XI0,
                "n_nodes":KEY_NODES,

                # simulation args
                "t":KEY_T,
                "extinction_time":KEY_T,
                "dt_s":KEY_DS,

                # output args
                "o":KEY_OUTDIR,
                "out":KEY_OUTDIR,
                "outdir":KEY_OUTDIR,
                "p":KEY_OUTPUT_PREFIX,
                "output_prefix":KEY_OUTPUT_PREFIX,

                # misc args
                "threads":KEY_THREADS,
                "verbose":KEY_VERBOSE
    }
    for i in config:
        if i not in [KEY_CWD,KEY_INPUT_PATH,KEY_COMMAND]:
            arguments[i.lower()] = i
    return arguments

def load_yaml(f):
    try:
        input_config = yaml.safe_load(f)
    except yaml.YAMLError as err:
        mark = getattr(err,"problem_mark",None)
        if mark is not None:
            sys.stderr.write(cyan(f'Error: failed to read config file, yaml syntax error at line {mark.line+1}, column {mark.column+1}.\n'))
        else:
            sys.stderr.write(cyan(f'Error: failed to read config file. Ensure your file in correct yaml format.\n'))
        sys.exit(EXIT_USAGE)
    if input_config is None:
        input_config = {}
    if not isinstance(input_config,dict):
        sys.stderr.write(cyan(f'Error: config file must hold `key: value` pairs.\n'))
        sys.exit(EXIT_USAGE)
    return input_config

def return_path_keys():
    return [KEY_OUTDIR]

def setup_absolute_paths(path_to_file,value):
    return os.path.join(path_to_file,os.path.expanduser(str(value)))

def parse_yaml_file(configfile,configdict):
    overwriting = 0
    path_keys = return_path_keys()

    path_to_file = os.path.abspath(os.path.dirname(configfile))
    configdict[KEY_INPUT_PATH] = path_to_file
    valid_keys = arg_dict(configdict)

    invalid_keys = []
    with open(configfile,"r") as f:
        input_config = load_yaml(f) # try load file else exit with msg

        for key in input_config:
            value = input_config[key]
            if value == None: # dont count blank entries
                pass
            else:
                clean_key = str(key).lstrip("-").replace("-","_").rstrip(" ").lstrip(" ").lower()

                if clean_key in valid_keys:
                    clean_key = valid_keys[clean_key]
                else:
                    invalid_keys.append(key)
                    continue

                if clean_key in path_keys:
                    value = setup_absolute_paths(path_to_file,value)
                configdict[clean_key] = value
                overwriting += 1

    if len(invalid_keys)==1:
        sys.stderr.write(cyan(f'Error: invalid key in config file.\n') + f'\t- {invalid_keys[0]}\n')
        sys.exit(EXIT_USAGE)
    elif len(invalid_keys) >1:
        keys = ""
        for i in invalid_keys:
            keys += f"\t- {i}\n"
        sys.stderr.write(cyan(f'Error: invalid keys in config file.\n') + f'{keys}')
        sys.exit(EXIT_USAGE)
    print(green(f"Adding {overwriting} arguments to internal config."))

def setup_config_dict(cwd,config_arg):
    config = get_defaults()
    config[KEY_CWD] = cwd
    if config_arg:
        configfile = check_configfile(cwd,config_arg)

        parse_yaml_file(configfile,config)

    else:
        config[KEY_INPUT_PATH] = cwd
    return config

def misc_args_to_config(verbose,threads,seed,config):
    misc.add_arg_to_config(KEY_VERBOSE,verbose,config)
    misc.add_arg_to_config(KEY_THREADS,threads,config)
    misc.add_arg_to_config(KEY_SEED,seed,config)

    config[KEY_THREADS] = misc.int_or_exit(KEY_THREADS,config[KEY_THREADS],"-t/--threads")
    if config[KEY_THREADS] < 1:
        sys.stderr.write(cyan(f'Error: `-t/--threads` must be at least 1.\n'))
        sys.exit(EXIT_USAGE)
    if config[KEY_SEED] is not None:
        config[KEY_SEED] = misc.int_or_exit(KEY_SEED,config[KEY_SEED],"--seed")

def set_up_verbosity(config):
    verbose = bool(config[KEY_VERBOSE])
    custom_logger.setup_logger(quiet=not verbose, debug=verbose)
