"""Shared helpers for batch operation arrays and kernel status handling."""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import (
    ConfigurationError,
    PhantomDeletionError,
    SaturationError,
    UnsupportedOperationError,
)
from .hashing import MASK64

OP_INSERT = _kernels.OP_INSERT
OP_DELETE = _kernels.OP_DELETE


def normalize_keys(keys) -> np.ndarray:
    arr = np.ascontiguousarray(keys, dtype=np.uint64)
    if arr.ndim != 1:
        raise ConfigurationError("keys must be a 1-d sequence")
    return arr


def normalize_stream(ops, keys):
    ops_arr = np.ascontiguousarray(ops, dtype=np.uint8)
    keys_arr = normalize_keys(keys)
    if ops_arr.ndim != 1 or ops_arr.shape[0] != keys_arr.shape[0]:
        raise ConfigurationError("ops and keys must be 1-d sequences of equal length")
    if ops_arr.size and ops_arr.max() > OP_DELETE:
        raise ConfigurationError("op codes must be 0 (insert) or 1 (delete)")
    return ops_arr, keys_arr


def single_op(op_code: int, key: int):
    return (
        np.array([op_code], dtype=np.uint8),
        np.array([int(key) & MASK64], dtype=np.uint64),
    )


def raise_for_status(status: int, op_index: int, keys) -> None:
    """Translate a kernel status into the contract exception it stands for."""
    if status == _kernels.OK:
        return
    key = int(keys[op_index])
    if status == _kernels.PHANTOM:
        raise PhantomDeletionError(
            f"op {op_index}: deleting key {key} would drive a counter below zero"
        )
    if status == _kernels.SATURATED:
        raise SaturationError(f"op {op_index}: counter for key {key} is saturated")
    if status == _kernels.UNSUPPORTED:
        raise UnsupportedOperationError(
            f"op {op_index}: this sketch does not support that operation"
        )
    raise AssertionError(f"unexpected kernel status {status}")
