import os
import tempfile
from contextlib import contextmanager
from pathlib import Path


class RunDirectory():
    """Filesystem session: every write lands in a temporary file that replaces its target on success."""

    @staticmethod
    @contextmanager
    def scope(path: Path, binary: bool = False):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, temporary = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, 'wb' if binary else 'w', encoding=None if binary else 'utf-8') as handle:
                yield handle
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(temporary, path)
        finally:
            if os.path.exists(temporary):
                os.unlink(temporary)
