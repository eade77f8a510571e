"""Ground/plant segmentation, RANSAC row fitting and camera standardization."""

from canopyfit.rowfit.color import rgb_to_lab
from canopyfit.rowfit.config import MAIZE_ROWFIT, SOYBEAN_ROWFIT, RowFitConfig, rowfit_preset
from canopyfit.rowfit.fit import RowFitResult, run_rowfit, standardized_camera
from canopyfit.rowfit.ransac import LineModel, PlaneModel, fit_plane_lsq, fit_rows, ransac_plane
from canopyfit.rowfit.segment import normalized_lab, sample_in_box, segment_cloud, voxel_downsample

__all__ = [
    "LineModel",
    "MAIZE_ROWFIT",
    "PlaneModel",
    "RowFitConfig",
    "RowFitResult",
    "SOYBEAN_ROWFIT",
    "fit_plane_lsq",
    "fit_rows",
    "normalized_lab",
    "ransac_plane",
    "rgb_to_lab",
    "rowfit_preset",
    "run_rowfit",
    "sample_in_box",
    "segment_cloud",
    "standardized_camera",
    "voxel_downsample",
]
