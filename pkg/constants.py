# Constants used throughout the solver
D_EXACT = 6  # exact hull joins up to this many dimensions
WIDEN_DELAY = 3
MAX_UNROLL = 1000
MAX_ROUNDS = 10
SEARCH_LIMIT = 100000
TUPLE_CAP = 10**6
STEP_BUDGET = 10**6
POINT_BUDGET = 10**5  # poly_integer_points default

# Exact bound shaving runs when a constraint's sub-box holds at most this many points
SHAVE_BUDGET = 4096
# Domain-level propagators enumerate sub-boxes up to this size
DOMAIN_BUDGET = 4096
# Polyhedral propagator skips components with more variables than this
POLY_VAR_LIMIT = 40
# Corner relaxation enumerates factor boxes up to this many integer points
CORNER_POINTS = 4096
# Concrete w fixpoint iteration cap
FIXPOINT_CAP = 10000

CONSISTENCY_LEVELS = ("bound", "domain", "poly")
JOIN_MODES = ("template", "hull")
RELAXATION_NOT_FOUND_MSG = (
    "Check if you have used the decorator @register_relaxation to register your relaxation!"
)

# Priority ladder of the propagation queue, lowest runs first
PRIORITY_INTERVAL = 0
PRIORITY_DOMAIN = 1
PRIORITY_POLY = 2
PRIORITY_GUARD = 3
PRIORITY_JOIN = 4
PRIORITIES = (PRIORITY_INTERVAL, PRIORITY_DOMAIN, PRIORITY_POLY, PRIORITY_GUARD, PRIORITY_JOIN)

# Answer statuses and CLI exit codes
FOUND = "found"
EXHAUSTED = "exhausted"
BUDGET_EXCEEDED = "budget-exceeded"
EXIT_FOUND = 0
EXIT_EXHAUSTED = 1
EXIT_BUDGET = 2
EXIT_INPUT_ERROR = 3
STATUS_EXIT_CODES = {FOUND: EXIT_FOUND, EXHAUSTED: EXIT_EXHAUSTED, BUDGET_EXCEEDED: EXIT_BUDGET}
STATUS_COLORS = {FOUND: "green", EXHAUSTED: "yellow", BUDGET_EXCEEDED: "red"}

# Plot colours
CONCRETE_COLOR = "tab:blue"  # concrete pairs of T
EXIT_COLOR = "tab:red"  # pairs of Z_w
POLYHEDRON_COLOR = "tab:green"  # abstract P
