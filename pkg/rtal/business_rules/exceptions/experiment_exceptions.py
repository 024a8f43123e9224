class EInvalidConfig(Exception):
    pass

class EEmptyGrid(Exception):
    pass
