"""AdREM: unsupervised domain adaptation by randomized hard EM."""

import numpy as np

from . import _core
from ._core import DEFAULT_SEED, Matrix, ParseError, majority_vote, sample_size, toy_defaults

__all__ = [
    "DEFAULT_SEED",
    "Matrix",
    "ParseError",
    "adrem",
    "as_matrix",
    "majority_vote",
    "make_arcs",
    "make_clusters",
    "read_svmlight",
    "sample_size",
    "select_C",
    "toy_defaults",
    "write_svmlight",
]


def as_matrix(x):
    """Wrap a 2-D array or a scipy.sparse matrix for the core routines."""
    if isinstance(x, Matrix):
        return x
    if hasattr(x, "tocsr"):
        csr = x.tocsr()
        return Matrix.from_csr(csr.data, csr.indices, csr.indptr, csr.shape[1])
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D feature array, got shape {arr.shape}")
    return Matrix.from_dense(arr)


def adrem(source_x, source_y, target_x, **kwargs):
    """Predict target labels with an AdREM ensemble.

    Returns a dict with ``labels`` (the vote), ``member_labels`` and
    ``traces`` (one list of per-iteration rows per member).
    """
    return _core.adrem(as_matrix(source_x), np.asarray(source_y), as_matrix(target_x), **kwargs)


def select_C(x, y, **kwargs):
    """Cross-validated choice of C on labeled data; ties favour the smaller C."""
    return _core.select_C(as_matrix(x), np.asarray(y), **kwargs)


def make_arcs(seed=DEFAULT_SEED, rotation_degrees=80.0):
    return _core.make_arcs(seed, rotation_degrees)


def make_clusters(seed=DEFAULT_SEED):
    return _core.make_clusters(seed)


def read_svmlight(path, n_features=0, labeled=True, sparse=True):
    """Read a svmlight file as (X, y). X is scipy CSR when scipy is available."""
    x, y = _core.read_svmlight(str(path), n_features, labeled)
    if not sparse:
        return x.to_dense(), y
    try:
        from scipy.sparse import csr_matrix
    except ImportError:
        return x, y
    data, indices, indptr, shape = x.csr_parts()
    return csr_matrix((data, indices, indptr), shape=shape), y


def write_svmlight(path, x, y=None):
    _core.write_svmlight(str(path), as_matrix(x), None if y is None else np.asarray(y))
