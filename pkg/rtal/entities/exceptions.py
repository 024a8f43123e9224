class EShapeMismatch(ValueError):
    pass

class EIndexOutOfRange(IndexError):
    pass

class ENonFiniteValue(ArithmeticError):
    pass

class EFullyMaskedRow(ValueError):
    pass

class ENonScalarLoss(ValueError):
    pass

class EEmptyTargets(ValueError):
    pass

class EStructuralError(ValueError):
    pass

class EInvalidModelConfig(ValueError):
    pass

class ESequenceTooLong(ValueError):
    pass

class EEmptyPrefix(ValueError):
    pass

class ENanGradient(ArithmeticError):
    pass

class ECheckpointMismatch(ValueError):
    pass

class EEmptyCorpus(ValueError):
    pass
