"""Inefficiency and collinearity controlled subset selection for OLS designs."""

from eemx.dataset import Dataset, bundled_gasoline, load_csv
from eemx.indices import model_index_report
from eemx.model_space import ControlParams, ModelSubset, brute_force_dcd, in_class
from eemx.pipeline import run_pipeline
from eemx.scoring import score_model, select_optimal
from eemx.vi_select import vi_algorithm
from eemx.vr_select import vr_algorithm

__all__ = [
    "ControlParams",
    "Dataset",
    "ModelSubset",
    "brute_force_dcd",
    "bundled_gasoline",
    "in_class",
    "load_csv",
    "model_index_report",
    "run_pipeline",
    "score_model",
    "select_optimal",
    "vi_algorithm",
    "vr_algorithm",
]

__version__ = "0.1.0"
