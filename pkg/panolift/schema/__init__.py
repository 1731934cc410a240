from panolift.schema.camera import AugmentationRanges, CameraParams, wrap_degrees
from panolift.schema.configs import AxisGrid, SearchConfig, SimConfig
from panolift.schema.files import PoseGravityFile, TrajectoryFile
from panolift.schema.results import CalibResult, MetricReport
from panolift.schema.trajectory import Trajectory

__all__ = [
    'AugmentationRanges', 'AxisGrid', 'CalibResult', 'CameraParams', 'MetricReport',
    'PoseGravityFile', 'SearchConfig', 'SimConfig', 'Trajectory', 'TrajectoryFile',
    'wrap_degrees',
]
