from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from panolift.schema.camera import CameraParams
from panolift.schema.trajectory import Trajectory
from panolift.utils.checks import is_rotation, is_unit


class TrajectoryFile(BaseModel):
    """On-disk trajectory: either a bare list of cameras or this object."""
    model_config = ConfigDict(frozen=True)

    source: Literal['simulated', 'real'] = 'real'
    frames: List[CameraParams]

    @classmethod
    def from_json_value(cls, value: Union[list, dict]) -> 'TrajectoryFile':
        if isinstance(value, list):
            return cls(frames=value)
        return cls(**value)

    def to_trajectory(self) -> Trajectory:
        return Trajectory(cameras=self.frames, source=self.source)


class PoseGravityFile(BaseModel):
    model_config = ConfigDict(frozen=True)

    poses: List[Tuple[Tuple[float, float, float], Tuple[float, float, float], Tuple[float, float, float]]]
    gravity: Optional[List[Tuple[float, float, float]]] = None

    @field_validator('poses')
    @classmethod
    def check_rotations(cls, value):
        for k, pose in enumerate(value):
            if not is_rotation(pose, tol=1e-6):
                raise ValueError(f'pose {k} is not a rotation matrix')
        return value

    @field_validator('gravity')
    @classmethod
    def check_unit(cls, value):
        if value is None:
            return value
        if not value:
            raise ValueError('gravity list is empty')
        for k, g in enumerate(value):
            if not is_unit(g, tol=1e-3):
                raise ValueError(f'gravity {k} is not a unit vector')
        return value

    def rotations(self) -> List[np.ndarray]:
        return [np.asarray(p, dtype=np.float64) for p in self.poses]

    def gravity_vectors(self) -> Optional[np.ndarray]:
        if self.gravity is None:
            return None
        return np.asarray(self.gravity, dtype=np.float64)
