from .features import (FeatureVector, extract_features, jitter_ddp,
                       shimmer_local, track_f0)
from .stats import (PCAResult, pca, pearson, DegenerateVarianceError,
                    UndefinedCorrelationError)
from .classify import (kfold_uar, cross_predict_uar, uar, LinearOvR,
                       stratified_folds, StratificationError,
                       FeatureSchemaError, C_GRID)
from .contrast import (RatingRow, BinResult, contrast_curve,
                       rating_rows_from_state)

__all__ = [
    "FeatureVector", "extract_features", "jitter_ddp", "shimmer_local",
    "track_f0", "PCAResult", "pca", "pearson", "DegenerateVarianceError",
    "UndefinedCorrelationError", "kfold_uar", "cross_predict_uar", "uar",
    "LinearOvR", "stratified_folds", "StratificationError",
    "FeatureSchemaError", "C_GRID", "RatingRow", "BinResult",
    "contrast_curve", "rating_rows_from_state",
]
