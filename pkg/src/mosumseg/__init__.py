"""Moving-window segmentation for high-dimensional piecewise regression.

The package detects multiple change points in the coefficients of a sparse
linear model by contrasting Lasso fits on adjacent moving windows, refines
the detected locations with a two-sided residual objective, and combines
several window widths through an anchor/cluster rule.  Tuning (penalty and
model size) is done by odd/even sample-splitting cross-validation.
"""

from .data import DataError, Dataset, load_csv, save_csv, save_truth_sidecar
from .detector import (DetectorSeries, GridSpec, PreEstimate, WindowSolver,
                       build_grid, compute_detector, detection_interval,
                       select_pre_estimators)
from .lasso import (COUNTER, LassoFit, LassoProblem, kkt_max_violation,
                    kkt_tolerance, lambda_max, solve)
from .metrics import (EvalReport, brute_force_segment, hausdorff_scaled,
                      qhat_bucket, separation_rates)
from .multiscale import (Cluster, MultiscaleState, cluster_pre_estimators,
                         identify_anchors, refine_cluster)
from .pipeline import (SegmentationResult, SegmentFit, segment, segment_cv,
                       segment_multiscale, segment_multiscale_cv)
from .refine import (RefinementWindow, RefineResult, make_refinement_window,
                     objective_q, refine_location)
from .simulate import (CovarianceSpec, NoiseSpec, SimConfig, SparseBetaSpec,
                       generate, preset, student_t5_scaled)
from .tuning import (BandwidthRule, CVReport, cross_validate,
                     default_lambda_grid, generate_bandwidths,
                     recommend_bandwidth)

__version__ = "0.1.0"
