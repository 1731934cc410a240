from typing import Annotated, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from panolift.config import (DEFAULT_FOV_RANGE, DEFAULT_PITCH_RANGE, DEFAULT_ROLL_RANGE,
                             DEFAULT_YAW_RANGE)


def wrap_degrees(angle: float) -> float:
    """Maps an angle to (-180, 180]; values already inside are returned untouched."""
    if -180.0 < angle <= 180.0:
        return angle
    return -((-angle + 180.0) % 360.0) + 180.0


# Pinhole camera: horizontal fov plus camera-to-world yaw/pitch/roll, all degrees
class CameraParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    fov_deg: Annotated[float, Field(gt=0, lt=180, allow_inf_nan=False,
                                    description='Horizontal field of view in degrees')] = 90.0
    yaw_deg: Annotated[float, Field(allow_inf_nan=False,
                                    description='Rotation about +Y, positive turns toward +X')] = 0.0
    pitch_deg: Annotated[float, Field(ge=-90, le=90, allow_inf_nan=False,
                                      description='Positive looks up')] = 0.0
    roll_deg: Annotated[float, Field(allow_inf_nan=False,
                                     description='Positive turns image content counter-clockwise')] = 0.0

    @field_validator('yaw_deg', 'roll_deg')
    @classmethod
    def wrap_angle(cls, v: float) -> float:
        return wrap_degrees(v)

    def with_yaw(self, yaw_deg: float) -> 'CameraParams':
        return self.model_copy(update={'yaw_deg': wrap_degrees(yaw_deg)})


Range = Tuple[float, float]


class AugmentationRanges(BaseModel):
    model_config = ConfigDict(frozen=True)

    fov: Range = DEFAULT_FOV_RANGE
    pitch: Range = DEFAULT_PITCH_RANGE
    roll: Range = DEFAULT_ROLL_RANGE
    yaw: Range = DEFAULT_YAW_RANGE

    @model_validator(mode='after')
    def check_bounds(self):
        for name in ('fov', 'pitch', 'roll', 'yaw'):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f'{name} range has lo > hi: [{lo}, {hi}]')
        if self.fov[0] <= 0 or self.fov[1] >= 180:
            raise ValueError('fov range must lie inside (0, 180)')
        if self.pitch[0] < -90 or self.pitch[1] > 90:
            raise ValueError('pitch range must lie inside [-90, 90]')
        return self
