"""Binary container for shipping the query side of a sketch to a collector.

Layout (little-endian, normative)::

  offset  size   field
  0       4      magic "SFSK"
  4       1      format version, currently 1
  5       1      variant code
  6       2      reserved, must be zero
  8       4      d (u32)
  12      4      w (u32)
  16      8      master_seed (u64)
  24      8      insertions_seen (u64)
  32      4*d*w  counters, u32, array-major (array 0 buckets 0..w-1, ...)

No trailing bytes are permitted. Variant codes 1..4 and 6 are the slim-fat
variants (5 is reserved), codes 10..13 are whole-baseline dumps (count-min,
signed-median, conservative-update, log-counter; the signed counters travel
as two's complement, log exponents are widened to u32). The collector
rebuilds the hash family from master_seed alone, so its answers match the
exporting sketch bit for bit.
"""

from __future__ import annotations

import struct

import numpy as np

from . import _kernels
from ._ops import normalize_keys
from .baselines import CmlSketch, CmSketch, CountSketch, CuSketch, cml_value
from .errors import (
    BadMagicError,
    ExportFormatError,
    PayloadLengthError,
    UnknownVariantCodeError,
    UnsupportedVersionError,
)
from .hashing import MASK64, seed_array
from .sf import SfSketch, Variant

MAGIC = b"SFSK"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sBBHIIQQ")

CODE_SF1 = 1
CODE_SF2 = 2
CODE_SF3 = 3
CODE_SF4 = 4
# 5 reserved
CODE_SFF = 6
CODE_CM = 10
CODE_COUNT = 11
CODE_CU = 12
CODE_CML = 13

VARIANT_TO_CODE = {
    Variant.SF1: CODE_SF1,
    Variant.SF2: CODE_SF2,
    Variant.SF3: CODE_SF3,
    Variant.SF4: CODE_SF4,
    Variant.SFF: CODE_SFF,
}

# codes whose query semantics is "minimum over the d hashed counters"
_MIN_CODES = frozenset({CODE_SF1, CODE_SF2, CODE_SF3, CODE_SF4, CODE_SFF, CODE_CM, CODE_CU})
_VALID_CODES = _MIN_CODES | {CODE_COUNT, CODE_CML}


def export_slim(sketch) -> bytes:
    """Serialize the query-facing counters of any sketch in this package."""
    if isinstance(sketch, SfSketch):
        code = VARIANT_TO_CODE[sketch.variant]
        counters = sketch.slim.counters
        seen = sketch.slim.insertions_seen
    elif isinstance(sketch, CmSketch):
        code, counters, seen = CODE_CM, sketch.counters, sketch.insertions_seen
    elif isinstance(sketch, CountSketch):
        code, counters, seen = CODE_COUNT, sketch.counters.view(np.uint32), sketch.insertions_seen
    elif isinstance(sketch, CuSketch):
        code, counters, seen = CODE_CU, sketch.counters, sketch.insertions_seen
    elif isinstance(sketch, CmlSketch):
        code, counters, seen = CODE_CML, sketch.exponents.astype(np.uint32), sketch.insertions_seen
    else:
        raise TypeError(f"cannot export {type(sketch).__name__}")
    d, w = counters.shape
    header = HEADER.pack(MAGIC, FORMAT_VERSION, code, 0, d, w, sketch.params.master_seed, seen)
    body = np.ascontiguousarray(counters, dtype="<u4").tobytes()
    return header + body


def import_slim(data: bytes, *, cml_base: float = CmlSketch.DEFAULT_BASE) -> "CollectorSketch":
    """Parse an export payload into a query-only collector sketch."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"expected magic {MAGIC!r}")
    if len(data) < HEADER.size:
        raise PayloadLengthError(f"truncated header: {len(data)} bytes")
    _, version, code, reserved, d, w, master_seed, seen = HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"version {version} unsupported")
    if code not in _VALID_CODES:
        raise UnknownVariantCodeError(f"variant code {code} unknown")
    if reserved != 0:
        raise ExportFormatError("reserved header bytes must be zero")
    if d < 1 or w < 1:
        raise ExportFormatError(f"bad dimensions d={d} w={w}")
    expected = HEADER.size + 4 * d * w
    if len(data) < expected:
        raise PayloadLengthError(f"truncated payload: {len(data)} of {expected} bytes")
    if len(data) > expected:
        raise PayloadLengthError(f"trailing bytes: {len(data) - expected}")
    raw = np.frombuffer(data, dtype="<u4", count=d * w, offset=HEADER.size)
    counters = raw.astype(np.uint32).reshape(d, w)
    return CollectorSketch(code, master_seed, seen, counters, cml_base)


class CollectorSketch:
    """Immutable query-only sketch rebuilt from an export payload.

    Safe to share across any number of concurrent query workers; the query
    kernels release the GIL.
    """

    def __init__(self, variant_code, master_seed, insertions_seen, counters, cml_base):
        self.variant_code = int(variant_code)
        self.master_seed = int(master_seed)
        self.insertions_seen = int(insertions_seen)
        self.counters = counters
        self.counters.setflags(write=False)
        self.d, self.w = counters.shape
        self._seeds = seed_array(self.master_seed, 0, self.d)
        self.cml_base = float(cml_base)
        if self.variant_code == CODE_CML and counters.max(initial=0) > 0xFFFF:
            raise ExportFormatError("log-counter exponent exceeds 16 bits")

    def query(self, key: int) -> int:
        return int(self.query_many([int(key) & MASK64])[0])

    def query_many(self, keys) -> np.ndarray:
        keys = normalize_keys(keys)
        out = np.empty(keys.shape[0], dtype=np.int64)
        if self.variant_code in _MIN_CODES:
            _kernels.min_query(self.counters, self._seeds, keys, out)
            return out
        if self.variant_code == CODE_COUNT:
            _kernels.count_query(self.counters.view(np.int32), self._seeds, keys, out)
            return out
        exps = self.counters.astype(np.uint16)
        _kernels.cml_min_exp(exps, self._seeds, keys, out)
        return cml_value(out, self.cml_base)

    def export(self) -> bytes:
        """Re-serialize; byte-identical to the payload this was parsed from."""
        header = HEADER.pack(
            MAGIC, FORMAT_VERSION, self.variant_code, 0,
            self.d, self.w, self.master_seed, self.insertions_seen,
        )
        return header + np.ascontiguousarray(self.counters, dtype="<u4").tobytes()
