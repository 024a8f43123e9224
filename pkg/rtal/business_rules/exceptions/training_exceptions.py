class ETrainingDiverged(ArithmeticError):
    pass

class EGradientCheckFailed(ArithmeticError):
    pass
