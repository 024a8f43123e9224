class ENotEnoughCheckpoints(Exception):
    pass

class ERunNotFound(Exception):
    pass
