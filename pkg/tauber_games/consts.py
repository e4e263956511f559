# Some constant objects

root = 0

#Tolerances: exact identities, quadrature oracle, simplex pivots
exact_tol = 1e-9
oracle_abstol = 1e-12
pivot_tol = 1e-12

#Backward induction never runs past this many stages
horizon_cap = 10**7

#Knots used when a closed form density is resampled as piecewise constant
regularize_knots = 10**4
regularize_sampling_err = 1e-6

#Sample counts for sign analysis in the L1 distance and for sup checks
smooth_samples = 256
sup_samples = 1000

#Progressbar widgets
try:
    from progressbar import Bar, ETA, Percentage
    pbar_avail = True
    widgets_sweep = ['Family sweep (root): ', Percentage(), ' ', Bar(), ' ', ETA()]
except ImportError:
    pbar_avail = False
    widgets_sweep = None

csv_header = ("family", "grid_point", "state", "lo", "hi", "deviation")
float_fmt = "%.17g"
