#!/usr/bin/env python3
from fastdiff.utils.log_colours import cyan
from fastdiff.utils import misc
from fastdiff.utils.config import *
from fastdiff.input_parsing.profile_arg_parsing import check_positive,optional_float

import sys

def simulate_group_parsing(scenario,T,cells,r_first,r_min,r_outer,boundary,s_end,ds,y_max,y_cells,
                           snapshot_every,compact,max_newton,tol,config):
    misc.add_arg_to_config(KEY_SCENARIO,scenario,config)
    misc.add_arg_to_config(KEY_T,T,config)
    misc.add_arg_to_config(KEY_CELLS,cells,config)
    misc.add_arg_to_config(KEY_R_FIRST,r_first,config)
    misc.add_arg_to_config(KEY_R_MIN,r_min,config)
    misc.add_arg_to_config(KEY_R_OUTER,r_outer,config)
    misc.add_arg_to_config(KEY_BOUNDARY,boundary,config)
    misc.add_arg_to_config(KEY_S_END,s_end,config)
    misc.add_arg_to_config(KEY_DS,ds,config)
    misc.add_arg_to_config(KEY_Y_MAX,y_max,config)
    misc.add_arg_to_config(KEY_Y_CELLS,y_cells,config)
    misc.add_arg_to_config(KEY_SNAPSHOT_EVERY,snapshot_every,config)
    misc.add_arg_to_config(KEY_COMPACT,compact,config)
    misc.add_arg_to_config(KEY_MAX_NEWTON,max_newton,config)
    misc.add_arg_to_config(KEY_TOL,tol,config)

    misc.choice_or_exit(KEY_SCENARIO,config[KEY_SCENARIO],SCENARIOS,"--scenario")
    misc.choice_or_exit(KEY_BOUNDARY,config[KEY_BOUNDARY],BOUNDARY_MODES,"--boundary")

    for key,flag in [(KEY_T,"--T"),(KEY_R_FIRST,"--r-first"),(KEY_S_END,"--s-end"),
                     (KEY_Y_MAX,"--y-max"),(KEY_TOL,"--tol")]:
        config[key] = misc.float_or_exit(key,config[key],flag)
        check_positive(key,config,flag)
    for key,flag in [(KEY_R_MIN,"--r-min"),(KEY_R_OUTER,"--r-outer"),(KEY_DS,"--ds")]:
        optional_float(key,config,flag)
        check_positive(key,config,flag)
    for key,flag in [(KEY_CELLS,"--cells"),(KEY_Y_CELLS,"--y-cells"),(KEY_SNAPSHOT_EVERY,"--snapshot-every"),
                     (KEY_MAX_NEWTON,"--max-newton")]:
        if config[key] is None and key == KEY_SNAPSHOT_EVERY:
            continue
        config[key] = misc.int_or_exit(key,config[key],flag)
        if config[key] < 1:
            sys.stderr.write(cyan(f'Error: `{flag}` must be at least 1.\n'))
            sys.exit(EXIT_USAGE)
    if config[KEY_COMPACT] is not None:
        config[KEY_COMPACT] = misc.pair_or_exit(KEY_COMPACT,config[KEY_COMPACT],"--compact")

    if config[KEY_SCENARIO].endswith("_V") and config[KEY_R_MIN] is None:
        config[KEY_R_MIN] = config[KEY_R_FIRST]
    if config[KEY_SCENARIO].endswith("_psi"):
        config[KEY_R_MIN] = None

def perturbation_group_parsing(bump,amplitude,r_lo,r_hi,width,envelope,config):
    misc.add_arg_to_config(KEY_BUMP,bump,config)
    misc.add_arg_to_config(KEY_AMPLITUDE,amplitude,config)
    misc.add_arg_to_config(KEY_R_LO,r_lo,config)
    misc.add_arg_to_config(KEY_R_HI,r_hi,config)
    misc.add_arg_to_config(KEY_WIDTH,width,config)
    misc.add_arg_to_config(KEY_ENVELOPE,envelope,config)

    misc.choice_or_exit(KEY_BUMP,config[KEY_BUMP],BUMP_SHAPES,"--bump")
    config[KEY_AMPLITUDE] = misc.float_or_exit(KEY_AMPLITUDE,config[KEY_AMPLITUDE],"--amplitude")
    config[KEY_R_LO],config[KEY_R_HI] = misc.pair_or_exit(KEY_R_LO,[config[KEY_R_LO],config[KEY_R_HI]],"--r-lo/--r-hi")
    optional_float(KEY_WIDTH,config,"--width")
    check_positive(KEY_WIDTH,config,"--width")
    config[KEY_ENVELOPE] = misc.pair_or_exit(KEY_ENVELOPE,config[KEY_ENVELOPE],"--envelope")
    if not config[KEY_ENVELOPE][0] > 0:
        sys.stderr.write(cyan(f'Error: `--envelope` factors must be positive.\n'))
        sys.exit(EXIT_USAGE)
