# constants

__all__ = ['FIG_W', 'FIG_H', 'WL', 'FONT_SIZE', 'LEGEND_FONT',
           'PLOT_FACE_COLOR', 'FIGURE_BG_COLOR',
           'BETA', 'KAPPA', 'HORIZON', 'STEPS', 'SELF_LOOP_WEIGHT',
           'SCHEMA_VERSION', 'DEFAULT_ATOMS', 'OBSTACLE', 'MAX_ATOMS',
           'REWARD_LOW', 'REWARD_HIGH', 'BENCH_ROWS', 'BENCH_STEPS', 'MEMORY_FRACTION', 'BYTES_PER_EDGE',
           'EXIT_CODES', 'INF']

FIG_W = 3.5
FIG_H = 2.45

# level used for logging progress that is not a warning (WL = Warning Level)
WL = 25

FONT_SIZE = 9
LEGEND_FONT = 'x-small'
PLOT_FACE_COLOR = 'lightsteelblue'
FIGURE_BG_COLOR = 'aliceblue'

INF = float('inf')

# planning defaults; scenario files and command line flags override
BETA = 500.0
KAPPA = 100.0
HORIZON = 4
STEPS = 200
SELF_LOOP_WEIGHT = 1.0
# uniform reward bounds when a scenario gives none
REWARD_LOW = 10.0
REWARD_HIGH = 25.0

SCHEMA_VERSION = 1
DEFAULT_ATOMS = ('Base', 'Supply', 'Report', 'Obstacle', 'Survey')
OBSTACLE = 'Obstacle'
# label sets are held as bitmasks
MAX_ATOMS = 16

# (grid side, horizon) rows of the scalability table
BENCH_ROWS = ((10, 4), (10, 6), (30, 4), (30, 8), (50, 4))
BENCH_STEPS = 20
# bench refuses products whose estimated footprint exceeds this share of free memory
MEMORY_FRACTION = 0.5
# edge arrays: src, dst, three component edge ids, h, v, omega
BYTES_PER_EDGE = 64

EXIT_CODES = {
    0: 'success',
    2: 'bad input: LTL syntax, automaton file or scenario schema',
    3: 'no feasible start: every initial product state has infinite energy',
    4: 'benchmark memory guard tripped for every requested row',
    5: 'output directory not writable',
}
