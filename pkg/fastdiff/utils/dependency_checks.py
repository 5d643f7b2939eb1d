#!/usr/bin/env python3
import sys
import importlib

from fastdiff.utils.log_colours import green,cyan
from fastdiff.utils.config import EXIT_USAGE

def check_module(module, missing):
    try:
        importlib.import_module(module)
    except ImportError:
        missing.append(module)

def module_versions(module_list):
    versions = {}
    for module in module_list:
        imported = importlib.import_module(module)
        versions[module] = getattr(imported,"__version__","unknown")
    return versions

def check_dependencies(module_list, verbose=False):

    missing = []

    for module in module_list:
        check_module(module, missing)

    if missing:
        if len(missing)==1:
            sys.stderr.write(cyan(f'Error: Missing dependency `{missing[0]}`.')+'\nPlease update your fastdiff environment.\n')
            sys.exit(EXIT_USAGE)
        else:
            dependencies = ""
            for i in missing:
                dependencies+=f"\t- {i}\n"

            sys.stderr.write(cyan(f'Error: Missing dependencies.')+f'\n{dependencies}Please update your fastdiff environment.\n')
            sys.exit(EXIT_USAGE)
    elif verbose:
        print(green("All dependencies satisfied."))
