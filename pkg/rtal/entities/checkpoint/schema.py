from typing import Dict

import numpy as np
from pydantic import BaseModel, conint

OPTIMIZER_PREFIX = "adam."


class Checkpoint(BaseModel):
    step: conint(ge=0)
    config_digest: str
    params: Dict[str, np.ndarray]

    class Config:
        arbitrary_types_allowed = True

    @property
    def model_params(self) -> Dict[str, np.ndarray]:
        return {name: value for name, value in self.params.items() if not name.startswith(OPTIMIZER_PREFIX)}

    @property
    def optimizer_params(self) -> Dict[str, np.ndarray]:
        return {name: value for name, value in self.params.items() if name.startswith(OPTIMIZER_PREFIX)}
