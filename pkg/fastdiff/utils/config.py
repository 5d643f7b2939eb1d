# COMMAND KEYS
KEY_COMMAND="command"

# PARAMETER KEYS
KEY_N="n"
KEY_M="m"
KEY_RHO1="rho1"
KEY_BETA="beta"
KEY_LAMBDA="lambda"
KEY_LAMBDA2="lambda2"

# PROFILE KEYS
KEY_KIND="kind"
KEY_R_MAX="r_max"
KEY_S_MIN="s_min"
KEY_TOL="tol"
KEY_XI0="xi0"
KEY_NODES="nodes"
KEY_START="start"
KEY_METHOD="method"
KEY_INVERT="invert"

# ASYMPTOTICS KEYS
KEY_S_MAX="s_max"
KEY_WINDOW="window"
KEY_SYNTHETIC_B="synthetic_b"
KEY_REQUIRE_SECOND_ORDER="require_second_order"

# SIMULATION KEYS
KEY_SCENARIO="scenario"
KEY_T="T"
KEY_CELLS="cells"
KEY_R_FIRST="r_first"
KEY_R_MIN="r_min"
KEY_R_OUTER="r_outer"
KEY_BOUNDARY="boundary"
KEY_S_END="s_end"
KEY_DS="ds"
KEY_Y_MAX="y_max"
KEY_Y_CELLS="y_cells"
KEY_SNAPSHOT_EVERY="snapshot_every"
KEY_COMPACT="compact"
KEY_MAX_NEWTON="max_newton"
KEY_STATIONARY_TOL="stationary_tol"
KEY_RATE_TOL="rate_tol"

# PERTURBATION KEYS
KEY_BUMP="bump"
KEY_AMPLITUDE="amplitude"
KEY_R_LO="r_lo"
KEY_R_HI="r_hi"
KEY_WIDTH="width"
KEY_ENVELOPE="envelope"

# OUTPUT AND DIRECTORIES
KEY_INPUT_PATH="input_path"
KEY_CWD="cwd"
KEY_OUTDIR="outdir"
KEY_OUTPUT_PREFIX="output_prefix"
KEY_DATESTAMP="datestamp"
KEY_OVERWRITE="overwrite"

# MISC KEYS
KEY_SEED="seed"
KEY_THREADS="threads"
KEY_VERBOSE="verbose"

# ENVIRONMENT
ENV_MAX_WORKERS="FASTDIFF_MAX_WORKERS"

# EXIT CODES
EXIT_OK=0
EXIT_USAGE=1
EXIT_NUMERICAL=2
EXIT_INVARIANT=3


PROFILE_KINDS = ["cylinder","regular","singular"]
ASYMPT_KINDS = ["regular","singular","synthetic"]
SCENARIOS = ["exact_psi","perturbed_psi","exact_V","perturbed_V"]
BOUNDARY_MODES = ["dirichlet","neumann"]
BUMP_SHAPES = ["box","cosine"]
START_MODES = ["series","literal"]
METHODS = ["auto","DOP853","Radau"]

module_list = ["numpy","scipy","yaml"]
