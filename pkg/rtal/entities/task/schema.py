from enum import Enum

from pydantic import BaseModel, conint, validator

from rtal.entities.model.schema import FIRST_TOKEN_ID


class TaskKind(str, Enum):
    COPY = "copy"
    REVERSE = "reverse"
    SORT = "sort"


class Split(str, Enum):
    TRAIN = "train"
    VALID = "valid"
    TEST = "test"


class SyntheticTask(BaseModel):
    kind: TaskKind = TaskKind.COPY
    vocab_size: conint(ge=FIRST_TOKEN_ID + 1) = 16
    min_len: conint(ge=1) = 3
    max_len: conint(ge=1) = 12
    train_size: conint(ge=1) = 20000
    valid_size: conint(ge=1) = 200
    test_size: conint(ge=1) = 500

    @validator('max_len')
    def length_range_is_ordered(cls, v, values):
        if 'min_len' in values and v < values['min_len']:
            raise ValueError(f"max_len={v} is below min_len={values['min_len']}")
        return v

    def size_of(self, split: Split) -> int:
        return {Split.TRAIN: self.train_size, Split.VALID: self.valid_size, Split.TEST: self.test_size}[split]
