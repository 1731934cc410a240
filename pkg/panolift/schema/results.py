from typing import Annotated, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from panolift.schema.camera import CameraParams


class CalibResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    fov_deg: float
    yaw_deg: float
    pitch_deg: float
    roll_deg: float
    residual: Annotated[float, Field(ge=0, description='Full-resolution mean squared error')]
    scoring_residual: Annotated[float, Field(ge=0, description='Residual at the scoring resolution')]
    evaluations: Annotated[int, Field(ge=0)]

    @property
    def camera(self) -> CameraParams:
        return CameraParams(fov_deg=self.fov_deg, yaw_deg=self.yaw_deg,
                            pitch_deg=self.pitch_deg, roll_deg=self.roll_deg)


class MetricReport(BaseModel):
    # PSNR of identical inputs is +inf; JSON carries it as "Infinity"
    model_config = ConfigDict(frozen=True, ser_json_inf_nan='strings')

    name: str
    value: float
    coverage: Annotated[Optional[float], Field(ge=0, le=1)] = None
    per_frame: List[float] = []
