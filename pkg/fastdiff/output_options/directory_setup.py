#!/usr/bin/env python3
from fastdiff.utils.log_colours import green,cyan
from fastdiff.utils import misc
from fastdiff.utils.config import *

import sys
import os
import glob

from datetime import date

"""
Desired behaviour

Default outdir -> <cwd>/fastdiff_<command>,
check if that exists, append a number if it already exists -> fastdiff_profile_2
--overwrite flag to reuse the directory, clearing the previous outputs
--datestamp appends the date -> fastdiff_profile_2026-XX-YY

If -o/--outdir then output that as the outdir instead
If -p/--output-prefix then output directory as: prefix_<command>
"""

def datestamped_outdir(config):
    today = date.today()
    d = today.strftime("%Y-%m-%d")

    if not KEY_OUTDIR in config:
        expanded_path = os.path.expanduser(config[KEY_CWD])
        outdir = os.path.join(expanded_path, f"{config[KEY_OUTPUT_PREFIX]}_{config[KEY_COMMAND]}")
    else:
        outdir = config[KEY_OUTDIR]
    if config[KEY_DATESTAMP]:
        outdir = f"{outdir}_{d}"

    if not config[KEY_OVERWRITE]:
        counter = 1
        base = outdir
        while os.path.exists(outdir):
            outdir = f"{base}_{counter}"
            counter +=1

    return outdir,d

def clear_old_files(config):
    if config[KEY_OVERWRITE] and os.path.exists(config[KEY_OUTDIR]):
        print(green("Overwriting previous output in ") + config[KEY_OUTDIR] + ".")
        old_files = glob.glob(f'{config[KEY_OUTDIR]}/*.*')
        snapshot_files = glob.glob(f'{config[KEY_OUTDIR]}/snapshots/*.csv')

        for d in [old_files,snapshot_files]:
            for f in d:
                try:
                    os.remove(f)
                except OSError:
                    print(cyan("Can't remove "),f)

def output_group_parsing(outdir,output_prefix,overwrite,datestamp,config):

    misc.add_path_to_config(KEY_OUTDIR,outdir,config)
    misc.add_arg_to_config(KEY_OUTPUT_PREFIX,output_prefix,config)
    misc.add_arg_to_config(KEY_OVERWRITE,overwrite,config)
    misc.add_arg_to_config(KEY_DATESTAMP,datestamp,config)

    config[KEY_OUTDIR],d = datestamped_outdir(config)

    clear_old_files(config)

    try:
        os.makedirs(config[KEY_OUTDIR],exist_ok=True)
    except OSError:
        sys.stderr.write(cyan(f'Error: cannot create output directory {config[KEY_OUTDIR]}.\n'))
        sys.exit(EXIT_USAGE)
