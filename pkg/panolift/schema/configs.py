from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from panolift.config import (DEFAULT_MAX_RATES, DEFAULT_NOISE_STD, DEFAULT_RENDER_SIZE,
                             DEFAULT_SEARCH_GRID)
from panolift.schema.camera import AugmentationRanges


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    frames: Annotated[int, Field(ge=1, description='Clip length T')] = 16
    ranges: AugmentationRanges = AugmentationRanges()
    yaw_rate: Annotated[float, Field(ge=0, description='Max |yaw velocity|, deg/frame')] = DEFAULT_MAX_RATES['yaw']
    pitch_rate: Annotated[float, Field(ge=0)] = DEFAULT_MAX_RATES['pitch']
    roll_rate: Annotated[float, Field(ge=0)] = DEFAULT_MAX_RATES['roll']
    noise_std: Annotated[float, Field(ge=0, description='Per-frame jitter, deg')] = DEFAULT_NOISE_STD
    seed: Annotated[int, Field(ge=0, lt=1 << 64)] = 0


class AxisGrid(BaseModel):
    """One searched parameter: coarse [lo, hi] by `step`, refined by `fine_step`."""
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    step: Annotated[float, Field(gt=0)]
    fine_step: Annotated[float, Field(gt=0)]

    @model_validator(mode='after')
    def check_steps(self):
        if self.lo > self.hi:
            raise ValueError(f'grid lo {self.lo} exceeds hi {self.hi}')
        if self.fine_step > self.step:
            raise ValueError('fine step must not exceed coarse step')
        return self

    @computed_field
    @property
    def count(self) -> int:
        return int((self.hi - self.lo) / self.step + 1e-9) + 1


def _axis(name: str) -> AxisGrid:
    lo, hi, step, fine = DEFAULT_SEARCH_GRID[name]
    return AxisGrid(lo=lo, hi=hi, step=step, fine_step=fine)


class SearchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    fov: AxisGrid = _axis('fov')
    pitch: AxisGrid = _axis('pitch')
    roll: AxisGrid = _axis('roll')
    render_size: Annotated[int, Field(ge=2, description='Scoring width in pixels')] = DEFAULT_RENDER_SIZE
    search_yaw: bool = False

    @model_validator(mode='after')
    def check_fov(self):
        if self.fov.lo <= 0 or self.fov.hi >= 180:
            raise ValueError('fov grid must lie inside (0, 180)')
        if self.pitch.lo < -90 or self.pitch.hi > 90:
            raise ValueError('pitch grid must lie inside [-90, 90]')
        return self
