class ECheckpointNotFound(Exception):
    pass

class ECorruptCheckpoint(Exception):
    pass

class EUnsupportedCheckpointVersion(Exception):
    pass

class EInvalidSequenceFile(Exception):
    pass
