"""
Core configuration settings
"""
import os
from dotenv import load_dotenv

# Pick up UNDERFIT_LOG / UNDERFIT_LOG_FORMAT from a local .env if present
load_dotenv()

# Logging
LOG_LEVEL = os.getenv("UNDERFIT_LOG", "WARNING").upper()
LOG_FORMAT = os.getenv("UNDERFIT_LOG_FORMAT", "text").lower()   # 'text' or 'json'
LOG_LINE = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'

# Rank-one SVD by power iteration
SVD_DEFAULTS = {
    'tol': 1e-10,        # Relative change of the Rayleigh quotient
    'max_iters': 1000
}

# NMU-ADMM on generic nonnegative matrices
NMU_DEFAULTS = {
    'gamma': 1.0,        # Penalty parameter
    'xi': 1.0,           # Dual step scale
    'residual_weight': 0.0,  # Weight of ½‖R‖F² in the R-update; 1.0 gives the regularized closed form
    'tau': 1e-5,         # Relative change tolerance on u and v
    'max_iters': 500,
    'record_history': True,
    'polish': True       # Final feasibility polish
}

# NMU-ADMM inside the robust fitting loop (P is noisy, factor feeds a refit)
NMU_ON_PREFERENCE = {
    'tau': 1e-4,
    'max_iters': 200
}

# Numerical floors
DIV_GUARD = 1e-30         # vᵀv / uᵀu below this means the factor collapsed
REL_EPS = 1e-12           # Denominator guard in relative changes
U_FLOOR = 1e-6            # Rows used by the feasibility polish
CLAMP_EPS = 1e-14         # Round-off clamp for initial factors
DEFLATION_STOP_REL = 1e-12  # Stop extracting when ‖residual‖F falls below this × ‖A‖F
LOAD_FLOOR_REL = 1e-9     # "Positive load" means v_j above this × max(v)
SUPPORT_FLOOR = 1e-6      # Factor entries above this count as support for a refit
DEGENERACY_REL = 1e-12    # Coincidence / collinearity threshold relative to sample scale
ALPHA_FLOOR = 1e-300

# Geometry
CIRCLE_REFINE = {
    'xtol': 1e-10,       # Relative step
    'ftol': 1e-15,       # Cost and gradient tolerances sit near machine precision
    'max_nfev': 100
}

# Hypothesis pool sizes per family
POOL_SIZES = {
    'line2d': 500,
    'circle2d': 5000,      # Clean triples are rare at 50% outliers
    'homography': 2000,
    'fundamental': 2000
}
REDRAW_FACTOR = 100       # Degenerate-sample redraw budget: REDRAW_FACTOR × n attempts

# Robust fitting
FIT_DEFAULTS = {
    'corr_threshold': 0.6,
    'max_biclusters': 50,
    'alpha_override': None,
    'exclusive_assignment': True,
    'prefilter': True,
    'post_test': True,
    'cdf_support': 'positive',   # 'positive' or 'all'
    'p_method': 'kolmogorov',    # 'kolmogorov' or 'smirnov'
    'seed': 0
}

# Synthetic datasets
SYNTH_DEFAULTS = {
    'star': {'k': 5, 'n_points': 500, 'noise': 0.0075, 'outlier_ratio': 0.5},
    'stairs': {'k': 4, 'n_points': 500, 'noise': 0.0075, 'outlier_ratio': 0.5},
    'circles': {'k': 5, 'n_points': 500, 'noise': 0.0075, 'outlier_ratio': 0.5},
    'homography': {'k': 3, 'n_points': 400, 'noise': 1.0, 'outlier_ratio': 0.25},
    'fundamental': {'k': 3, 'n_points': 400, 'noise': 1.0, 'outlier_ratio': 0.25}
}
IMAGE_SIZE = (640.0, 480.0)   # Width, height for synthetic correspondences

# Plots
PLOT_SETTINGS = {
    'figsize': (6.0, 6.0),
    'dpi': 100,
    'hashsalt': 'underfit',      # Fixed ids keep SVG output byte-identical
    'histogram_bins': 50,
    'colormap': 'tab10'
}
