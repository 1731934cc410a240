from typing import Annotated, List, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from panolift.schema.camera import CameraParams


class Trajectory(BaseModel):
    model_config = ConfigDict(frozen=True)

    cameras: Annotated[List[CameraParams], Field(min_length=1)]
    source: Literal['simulated', 'real'] = 'real'

    @model_validator(mode='after')
    def constant_fov_when_simulated(self):
        if self.source == 'simulated':
            fovs = {cam.fov_deg for cam in self.cameras}
            if len(fovs) != 1:
                raise ValueError('simulated trajectories keep one fov across frames')
        return self

    def __len__(self) -> int:
        return len(self.cameras)

    def __getitem__(self, k: int) -> CameraParams:
        return self.cameras[k]
