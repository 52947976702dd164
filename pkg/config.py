# Configuration settings for polywalk
import os

from dotenv import load_dotenv

load_dotenv()

# Reachability budget (points in a step graph)
BUDGET_POINTS = int(os.getenv("POLYWALK_BUDGET_POINTS", "50000"))

# Row-subset guard for vertex and circuit enumeration
MAX_SUBSETS = int(os.getenv("POLYWALK_MAX_SUBSETS", str(10**7)))

# Per-function memo size for polyhedron and circuit computations
CACHE_SIZE = 256

# Below this many candidate bases, vertices are found by basis enumeration
BASIS_ENUMERATION_CUTOFF = 5000

# Subdeterminant enumeration guard, measured on the essential matrix
MAX_SUBDET_ROWS = 24
MAX_SUBDET_COLUMNS = 16

# Brute-force hull
MAX_HULL_DIMENSION = 4
MAX_HULL_POINTS = 32

# Support-minimality oracle enumerates every inequality-row subset
MAX_ORACLE_ROWS = 16

# Family generators
MAX_MATROID_GROUND_SET = 6
MAX_PARALLELOTOPE_DIMENSION = 6

# Elementary arrangement cell enumeration
MAX_ARRANGEMENT_HYPERPLANES = 12

# Randomized generation only
SEED = os.getenv("POLYWALK_SEED")

LOG_LEVEL = os.getenv("POLYWALK_LOG_LEVEL", "WARNING")

# Exit codes
EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_UNSUPPORTED = 3
