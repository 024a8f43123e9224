from typing import Optional

from pydantic import BaseModel, conint


class MetricRecord(BaseModel):
    step: conint(ge=0)
    loss: float
    token_accuracy: float
    lr: float
    wall_ms: float
    valid_exact_match: Optional[float] = None

    def reproducible(self) -> dict:
        """The record without its wall-clock field."""
        return self.dict(exclude={'wall_ms'})
