from enum import Enum

from pydantic import BaseModel


class AggStructure(str, Enum):
    NONE = "none"
    RTAL = "rtal"
    LINEAR_COMBINATION = "linear_combination"
    ITERATIVE_COMBINATION = "iterative_combination"
    CNN_LIKE_TREE = "cnn_like_tree"


class AggFormulaKind(str, Enum):
    MEAN = "mean"
    CONCAT_FFN = "concat_ffn"
    EWP_FFN = "ewp_ffn"


class AggPosition(str, Enum):
    ENCODER = "encoder"
    DECODER = "decoder"
    BOTH = "both"


TREE_STRUCTURES = (AggStructure.RTAL, AggStructure.CNN_LIKE_TREE)


class AggregationSpec(BaseModel):
    structure: AggStructure = AggStructure.NONE
    formula: AggFormulaKind = AggFormulaKind.EWP_FFN
    position: AggPosition = AggPosition.BOTH

    @property
    def enabled(self) -> bool:
        return self.structure != AggStructure.NONE

    @property
    def on_encoder(self) -> bool:
        return self.enabled and self.position in (AggPosition.ENCODER, AggPosition.BOTH)

    @property
    def on_decoder(self) -> bool:
        return self.enabled and self.position in (AggPosition.DECODER, AggPosition.BOTH)

    def label(self) -> str:
        if not self.enabled:
            return AggStructure.NONE.value
        return f"{self.structure.value}/{self.formula.value}/{self.position.value}"