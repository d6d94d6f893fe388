"""
Survey Cache
Description: Versioned, line-oriented store of PrimeSurveyRecords that lets an
interrupted survey resume where it stopped.

================================================================================
FORMAT
================================================================================
One record per line, one line per prime, sorted by q:

    v1|q|oracle_min|min_exponent|a|b|m1|m2|supersingular_min|class_count

Empty fields stand for missing values (oracle-only records). A line with a
different version tag raises CacheVersionError; any other unparsable line
raises CacheReadError. Both report the byte offset of the line.

Writes merge the new records into the existing file, write the result to a
temporary file in the same directory and os.replace() it over the old one.
Readers only ever open the final file name, so a leftover temporary file from
an interrupted run is ignored.
================================================================================
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, Optional

from ..curves.elliptic_core import GroupStructure, WeierstrassCurve
from ..errors import CacheReadError, CacheVersionError
from ..experiments.survey import PrimeSurveyRecord

logger = logging.getLogger(__name__)

CACHE_SCHEMA_VERSION = 1
CACHE_FILE = 'survey.cache'
FIELD_COUNT = 10


def _opt(value: Optional[int]) -> str:
    return '' if value is None else str(value)


def encode_record(r: PrimeSurveyRecord) -> str:
    w, s = r.witness, r.witness_structure
    fields = [
        f'v{CACHE_SCHEMA_VERSION}', str(r.q), str(r.oracle_min), _opt(r.min_exponent),
        _opt(w.a if w else None), _opt(w.b if w else None),
        _opt(s.m1 if s else None), _opt(s.m2 if s else None),
        _opt(r.supersingular_min), str(r.class_count),
    ]
    return '|'.join(fields)


def decode_record(line: str, offset: int = -1) -> PrimeSurveyRecord:
    fields = line.split('|')
    tag = fields[0]
    if tag != f'v{CACHE_SCHEMA_VERSION}':
        if tag.startswith('v') and tag[1:].isdigit():
            raise CacheVersionError(f"cache line has schema {tag}, expected v{CACHE_SCHEMA_VERSION}", offset)
        raise CacheReadError(f"cache line does not start with a version tag: {line[:40]!r}", offset)
    if len(fields) != FIELD_COUNT:
        raise CacheReadError(f"cache line has {len(fields)} fields, expected {FIELD_COUNT}", offset)
    try:
        values = [int(f) if f else None for f in fields[1:]]
        q, oracle_min, min_exponent, a, b, m1, m2, supersingular_min, class_count = values
        if q is None or oracle_min is None or class_count is None:
            raise ValueError("q, oracle_min and class_count are required")
        if (a is None) != (b is None) or (m1 is None) != (m2 is None):
            raise ValueError("witness fields are partly empty")
        witness = WeierstrassCurve(q, a, b) if a is not None else None
        structure = GroupStructure(q, m1 * m2, m1, m2) if m1 is not None else None
    except (ValueError, TypeError) as e:
        raise CacheReadError(f"malformed cache line: {e}", offset) from e
    return PrimeSurveyRecord(q=q, oracle_min=oracle_min, min_exponent=min_exponent,
                             witness=witness, witness_structure=structure,
                             supersingular_min=supersingular_min, class_count=class_count)


class SurveyCache:
    """
    File-backed record store for survey_range.

    Args:
        directory: Cache directory, created on first write
        read_enabled: When False, load() returns nothing (a fresh run that
                      still refreshes the cache)
    """

    def __init__(self, directory: Path, read_enabled: bool = True):
        self.directory = Path(directory)
        self.read_enabled = read_enabled

    @property
    def path(self) -> Path:
        return self.directory / CACHE_FILE

    def read_all(self) -> Dict[int, PrimeSurveyRecord]:
        if not self.path.exists():
            return {}
        records: Dict[int, PrimeSurveyRecord] = {}
        offset = 0
        with open(self.path, 'rb') as fh:
            for raw in fh:
                line = raw.decode('utf-8', errors='replace').rstrip('\n')
                if line:
                    record = decode_record(line, offset)
                    records[record.q] = record
                offset += len(raw)
        return records

    def load(self, lo: int, hi: int) -> Dict[int, PrimeSurveyRecord]:
        if not self.read_enabled:
            return {}
        records = {q: r for q, r in self.read_all().items() if lo <= q <= hi}
        logger.debug("cache %s: %d records in [%d, %d]", self.path, len(records), lo, hi)
        return records

    def store(self, records: Iterable[PrimeSurveyRecord]) -> None:
        merged = self.read_all()
        for r in records:
            merged[r.q] = r
        self.directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix='.survey.', suffix='.tmp')
        try:
            with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as fh:
                for q in sorted(merged):
                    fh.write(encode_record(merged[q]) + '\n')
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
