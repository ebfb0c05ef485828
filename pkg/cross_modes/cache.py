"""On-disk store of solved (beta, class, grid) cells."""

import hashlib
import json
import logging
import os
import tempfile
from math import isclose
from pathlib import Path

import dill
import numpy as np

from cross_modes.base import CacheIntegrityError

logger = logging.getLogger(__name__)

CACHE_ENV = "CROSS_MODES_CACHE"
DEFAULT_CACHE_DIR = ".cross_modes_cache"


def default_cache_dir():
    return Path(os.environ.get(CACHE_ENV, DEFAULT_CACHE_DIR))


def cell_key(problem, N, tol, scheme="fd", full=False, version=None):
    """
    Canonical key of a solved cell.

    Returns
    -------
    dict
        JSON-serializable key fields, including the code version.

    """
    if version is None:
        from cross_modes import __version__ as version

    return {
        "beta": repr(float(problem.beta)),
        "sym": problem.sym.value,
        "L_x": repr(float(problem.L_x)),
        "L_y": repr(float(problem.L_y)),
        "N": int(N),
        "tol": repr(float(tol)),
        "scheme": scheme,
        "full": bool(full),
        "version": version,
    }


def _digest(key):
    return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()


def _same_record(a, b, rtol=1e-9):
    if a._fields != b._fields:
        return False
    for name in a._fields:
        if name == "t_run":
            continue
        x, y = getattr(a, name), getattr(b, name)
        if isinstance(x, float) and isinstance(y, float):
            if not (isclose(x, y, rel_tol=rtol, abs_tol=1e-300) or (np.isnan(x) and np.isnan(y))):
                return False
        elif isinstance(x, tuple) and isinstance(y, tuple):
            if not np.allclose(x, y, rtol=rtol, atol=0.0):
                return False
        elif x != y:
            return False
    return True


class ResultCache:
    """
    Immutable keyed store of sweep records and eigenvectors.

    Entries are dill files named by the SHA-256 of the canonical key, written through a temporary
    file and an atomic rename. Re-storing a key with a different record raises.

    Parameters
    ----------
    directory : os.PathLike or str, optional
        Cache directory. Defaults to ``$CROSS_MODES_CACHE`` or ``.cross_modes_cache``.

    """

    def __init__(self, directory=None):
        self.directory = default_cache_dir() if directory is None else Path(directory)

    def __repr__(self):
        return f"ResultCache({str(self.directory)!r})"

    def _path(self, key):
        return self.directory / f"{_digest(key)}.dill"

    def __contains__(self, key):
        return self._path(key).exists()

    def get(self, key):
        """
        Load an entry.

        Returns
        -------
        dict or None
            ``{"key", "record", "eigenvector"}``, or `None` on a miss.

        """
        path = self._path(key)
        try:
            with path.open(mode="rb") as fid:
                entry = dill.load(fid)
        except FileNotFoundError:
            return None
        if entry["key"] != key:
            raise CacheIntegrityError(f"Entry {path.name} holds a different key.")
        logger.debug(f"Cache hit {path.name}.")
        return entry

    def put(self, key, record, eigenvector=None):
        """
        Store an entry unless an identical one exists.

        Raises
        ------
        CacheIntegrityError
            If the key already holds a different record.

        """
        record = record._replace(t_run=None)
        existing = self.get(key)
        if existing is not None:
            if not _same_record(existing["record"], record):
                raise CacheIntegrityError(
                    f"Cache key for beta = {key['beta']}, class {key['sym']} already holds a "
                    "different result."
                )
            if existing.get("eigenvector") is not None or eigenvector is None:
                return

        self.directory.mkdir(parents=True, exist_ok=True)
        entry = {"key": key, "record": record, "eigenvector": eigenvector}
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, mode="wb") as fid:
                dill.dump(entry, fid)
            os.replace(tmp, self._path(key))
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        logger.debug(f"Cached {self._path(key).name}.")

    def clear(self):
        for path in self.directory.glob("*.dill"):
            path.unlink()
