#!/usr/bin/env python3
from fastdiff import __version__, _program

from fastdiff.input_parsing import initialising as init
from fastdiff.input_parsing import param_arg_parsing
from fastdiff.input_parsing import profile_arg_parsing
from fastdiff.input_parsing import simulate_arg_parsing

from fastdiff.output_options import directory_setup
from fastdiff.report_functions import report

from fastdiff.utils import misc
from fastdiff.utils import dependency_checks
from fastdiff.utils.errors import FastDiffError

from fastdiff.utils.custom_logger import logger
from fastdiff.utils.log_colours import green,cyan,red
from fastdiff.utils.config import *

import os
import sys
import argparse

cwd = os.getcwd()

def common_parser():
    """
    Options every subcommand takes: config file, parameters, output and misc.
    """
    parser = argparse.ArgumentParser(add_help=False)

    i_group = parser.add_argument_group('Input options')
    i_group.add_argument('-c',"--config", action="store",help="Input config file in yaml format, all command line arguments can be passed via the config file.", dest="config")

    p_group = parser.add_argument_group('Parameter options')
    p_group.add_argument("--n", action="store",dest="n",help="Space dimension, integer >= 3.")
    p_group.add_argument("--m", action="store",dest="m",help="Diffusion exponent, 0 < m < (n-2)/n.")
    p_group.add_argument("--rho1", action="store",dest="rho1",help="Scaling weight, rho1 > 0. Use `1` for the self-similar solutions of the flow.")
    p_group.add_argument("--beta", action="store",dest="beta",help="Scaling exponent, beta >= m*rho1/(n-2-nm).")
    p_group.add_argument("--lambda", action="store",dest="lam",help="Profile value at the origin (regular) or blow-up family member (singular). Default: `1.0`")

    o_group = parser.add_argument_group('Output options')
    o_group.add_argument('-o','--outdir', action="store",help="Output directory. Default: `fastdiff_<command>`")
    o_group.add_argument('-p','--output-prefix',action="store",help="Prefix of output directory: Default: `fastdiff`",dest="output_prefix")
    o_group.add_argument('--datestamp', action="store_true",help="Append datestamp to directory name. Default: no datestamp")
    o_group.add_argument('--overwrite', action="store_true",help="Overwrite output directory. Default: append an incrementing number if <-o/--outdir> already exists")

    misc_group = parser.add_argument_group('Misc options')
    misc_group.add_argument('-t', '--threads', action='store',dest="threads",help="Number of worker threads, capped by $FASTDIFF_MAX_WORKERS. Default: `1`")
    misc_group.add_argument("--seed", action="store",dest="seed",help="Seed for randomly placed perturbations. Default: `0`")
    misc_group.add_argument("--verbose",action="store_true",help="Print lots of stuff to screen")
    misc_group.add_argument("-h","--help",action="store_true",dest="help")
    return parser

def add_solver_group(parser):
    s_group = parser.add_argument_group('Profile solver options')
    s_group.add_argument("--r-max", action="store",dest="r_max",help="Outer radius of the profile grid. Default: `1000`")
    s_group.add_argument("--s-min", action="store",dest="s_min",help="Smallest log-radius of the output grid. Default: one below the seed radius")
    s_group.add_argument("--tol", action="store",dest="tol",help="Requested profile accuracy. Default: `1e-8`")
    s_group.add_argument("--xi0", action="store",dest="xi0",help="Radius below which singular profiles use the head expansion. Default: 1e-6 of the characteristic radius")
    s_group.add_argument("--nodes", action="store",dest="nodes",help="Number of output nodes. Default: `1000`")
    s_group.add_argument("--start", action="store",dest="start",help="Singular start: `series` or `literal` leading-order data. Default: `series`")
    s_group.add_argument("--method", action="store",dest="method",help="Integrator: `auto`, `DOP853` or `Radau`. Default: `auto`")

def build_parser():
    common = common_parser()

    parser = argparse.ArgumentParser(add_help=False,
    prog=_program,
    description=misc.preamble(__version__),
    usage='''
\tfastdiff constants --n 3 --m 0.2 --rho1 1 --beta 5 [options]
\tfastdiff profile --kind singular -c <config.yaml> [options]
\tfastdiff asympt --kind regular -c <config.yaml> [options]
\tfastdiff simulate --scenario perturbed_psi -c <config.yaml> [options]\n\n''')
    parser.add_argument("-v","--version", action='version', version=f"{_program} {__version__}")
    parser.add_argument("-h","--help",action="store_true",dest="help")

    subparsers = parser.add_subparsers(dest="command", metavar="<command>")

    subparsers.add_parser("constants", parents=[common], add_help=False,
                          help="Derived constants and the beta regime for a parameter set.")

    profile_parser = subparsers.add_parser("profile", parents=[common], add_help=False,
                                           help="Solve a cylinder, regular or singular profile.")
    add_solver_group(profile_parser)
    pr_group = profile_parser.add_argument_group('Profile options')
    pr_group.add_argument("--kind", action="store",dest="kind",help="Profile kind: `cylinder`, `regular` or `singular`. Default: `regular`")
    pr_group.add_argument("--invert", action="store_true",dest="invert",help="Also write the inverted profile (needs m=(n-2)/(n+2)).")

    asympt_parser = subparsers.add_parser("asympt", parents=[common], add_help=False,
                                          help="Fit the tail of a profile against its normal form.")
    add_solver_group(asympt_parser)
    a_group = asympt_parser.add_argument_group('Asymptotics options')
    a_group.add_argument("--kind", action="store",dest="kind",help="Tail to fit: `regular`, `singular` or `synthetic`. Default: `regular`")
    a_group.add_argument("--lambda2", action="store",dest="lambda2",help="Second family member for the B scaling check. Default: `2.0`")
    a_group.add_argument("--s-max", action="store",dest="s_max",help="Largest log-radius of the tail. Default: 100 past the characteristic radius")
    a_group.add_argument("--window", action="store",dest="window",help="Fit window in s as `lo,hi`. Default: the last 40%% of the grid")
    a_group.add_argument("--synthetic-b", action="store",dest="synthetic_b",help="B of the synthetic tail. Default: `0.5`")
    a_group.add_argument("--require-second-order", action="store_true",dest="require_second_order",help="Exit with an error unless beta is above beta2.")

    simulate_parser = subparsers.add_parser("simulate", parents=[common], add_help=False,
                                            help="Evolve the flow from self-similar data and track the rescaled solution.")
    sim_group = simulate_parser.add_argument_group('Simulation options')
    sim_group.add_argument("--scenario", action="store",dest="scenario",help="`exact_psi`, `perturbed_psi`, `exact_V` or `perturbed_V`. Default: `exact_psi`")
    sim_group.add_argument("--T", action="store",dest="T",help="Extinction time of the reference solution. Default: `1.0`")
    sim_group.add_argument("--cells", action="store",dest="cells",help="Number of radial cells. Default: `200`")
    sim_group.add_argument("--r-first", action="store",dest="r_first",help="First cell face away from the origin. Default: `0.01`")
    sim_group.add_argument("--r-min", action="store",dest="r_min",help="Puncture radius for singular runs. Default: <--r-first>")
    sim_group.add_argument("--r-outer", action="store",dest="r_outer",help="Outer radius. Default: covers the rescaled window to the end of the run")
    sim_group.add_argument("--boundary", action="store",dest="boundary",help="`dirichlet` (self-similar data) or `neumann` (no flux). Default: `dirichlet`")
    sim_group.add_argument("--s-end", action="store",dest="s_end",help="Rescaled time to run for. Default: `1.0`")
    sim_group.add_argument("--ds", action="store",dest="ds",help="Step in rescaled time. Default: `0.0025/alpha`, capped at `0.02`")
    sim_group.add_argument("--y-max", action="store",dest="y_max",help="Outer edge of the rescaled window. Default: `4.0`")
    sim_group.add_argument("--y-cells", action="store",dest="y_cells",help="Cells in the rescaled window. Default: `100`")
    sim_group.add_argument("--snapshot-every", action="store",dest="snapshot_every",help="Steps between snapshots. Default: about 100 snapshots per run")
    sim_group.add_argument("--compact", action="store",dest="compact",help="Compact set `lo,hi` for sup distances. Default: the whole window")
    sim_group.add_argument("--max-newton", action="store",dest="max_newton",help="Newton iterations per step. Default: `50`")
    sim_group.add_argument("--tol", action="store",dest="tol",help="Accuracy of the reference profile. Default: `1e-8`")

    pt_group = simulate_parser.add_argument_group('Perturbation options')
    pt_group.add_argument("--bump", action="store",dest="bump",help="Bump shape: `box` or `cosine`. Default: `box`")
    pt_group.add_argument("--amplitude", action="store",dest="amplitude",help="Relative bump amplitude. Default: `0.1`")
    pt_group.add_argument("--r-lo", action="store",dest="r_lo",help="Inner edge of the bump support. Default: `1.0`")
    pt_group.add_argument("--r-hi", action="store",dest="r_hi",help="Outer edge of the bump support. Default: `2.0`")
    pt_group.add_argument("--width", action="store",dest="width",help="Draw a support of this width inside [r_lo, r_hi] from the seed.")
    pt_group.add_argument("--envelope", action="store",dest="envelope",help="Lambda factors `lo,hi` of the enclosing solutions. Default: `0.001,1000`")

    return parser, subparsers

def print_config(config):
    print(red("\n**** CONFIG ****"))
    for k in sorted(config):
        print(green(f" - {k}: ") + f"{config[k]}")

def main(sysargs = sys.argv[1:]):

    parser, subparsers = build_parser()

    """
    Exit with help menu if no args supplied
    """

    if len(sysargs)<1:
        parser.print_help()
        sys.exit(0)
    else:
        args = parser.parse_args(sysargs)
        if args.help or args.command is None:
            if args.command is None:
                parser.print_help()
            else:
                subparsers.choices[args.command].print_help()
            sys.exit(0)

    dependency_checks.check_dependencies(module_list, args.verbose)

    # Initialise config dict
    config = init.setup_config_dict(cwd,args.config)
    config[KEY_COMMAND] = args.command

    # Threads, seed and verbosity to config
    init.misc_args_to_config(args.verbose,args.threads,args.seed,config)
    init.set_up_verbosity(config)

    param_arg_parsing.param_group_parsing(args.n,args.m,args.rho1,args.beta,args.lam,config)

    if args.command in ["profile","asympt"]:
        profile_arg_parsing.solver_group_parsing(args.r_max,args.s_min,args.tol,args.xi0,args.nodes,args.start,args.method,config)
    if args.command == "profile":
        profile_arg_parsing.profile_group_parsing(args.kind,args.invert,config)
    elif args.command == "asympt":
        profile_arg_parsing.asympt_group_parsing(args.kind,args.lambda2,args.s_max,args.window,args.synthetic_b,args.require_second_order,config)
    elif args.command == "simulate":
        simulate_arg_parsing.simulate_group_parsing(args.scenario,args.T,args.cells,args.r_first,args.r_min,args.r_outer,args.boundary,
                                                    args.s_end,args.ds,args.y_max,args.y_cells,args.snapshot_every,args.compact,
                                                    args.max_newton,args.tol,config)
        simulate_arg_parsing.perturbation_group_parsing(args.bump,args.amplitude,args.r_lo,args.r_hi,args.width,args.envelope,config)

    # sets up the output dir
    directory_setup.output_group_parsing(args.outdir,args.output_prefix,args.overwrite,args.datestamp,config)
    logger.setup_logfile(config[KEY_OUTDIR])

    if config[KEY_VERBOSE]:
        print_config(config)

    try:
        status = report.RUNNERS[args.command](config)
    except FastDiffError as err:
        logger.debug(f"{type(err).__name__}: {err}")
        hint = ""
        if getattr(err, "suggested_dt", None) is not None:
            hint = f" (suggested dt={err.suggested_dt:.3g}, lower `--ds` to get there)"
        sys.stderr.write(cyan(f"Error: {type(err).__name__}: {err}{hint}\n"))
        status = err.exit_code
    finally:
        logger.cleanup()

    return status

if __name__ == '__main__':
    sys.exit(main())
