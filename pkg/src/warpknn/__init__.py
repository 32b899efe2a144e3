"""DTW / DDTW similarity with distance-weighted kNN for multivariate trajectories."""
__version__ = "0.1.0"

from ._jit import BACKEND
from .errors import (DataError, DimensionMismatch, EmptyClass, EmptyFile, EmptyTrainingSet,
                     InvalidSeries, KTooLarge, MalformedRow, NonFiniteValue, SeriesTooShort,
                     TooManyFolds, UnknownInstanceId, UnsortedDistances, WarpKNNError)
from .evaluation import (ConfusionMatrix, EvalReport, FoldPlan, Protocol, loo_folds, metrics,
                         replicate, run_cv, stratified_folds)
from .kinematics import (ColumnMap, DatasetManifest, build_dataset, default_column_map,
                         load_kinematics, load_manifest)
from .knn import Prediction, classify, neighbor_weights, tune_k
from .series import (LabeledInstance, TimeSeries, derivative_transform, normalize, validate,
                     znormalize)
from .synth import SynthSpec, synth_dataset
from .warp import (DistanceMatrix, Measure, WarpConfig, WarpPath, ddtw_distance, distance,
                   dtw_distance, dtw_path, pairwise_matrix, point_distance)
from .export import export_results
