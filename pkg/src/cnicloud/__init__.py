"""Crowdsourced cellular-log analytics.

Ingests device logs named ``cniCloud_TIMESTAMP_LOC_MODEL_OPERATOR.log``,
builds in-memory tFile/tMsg metadata tables with lazy pointers back to the
on-disk message bodies, and answers SQL-subset queries over them --
sequentially or across hash-partitioned workers -- behind an HTTP service.
"""

from .errors import (
    CniCloudError,
    DuplicateFile,
    InvalidToken,
    IoFailure,
    MalformedBlock,
    MalformedName,
    QueryError,
    StaleIndex,
    UnknownFile,
)
from .logmodel import (
    FileRecord,
    LogFileKey,
    MessageBody,
    MsgRecord,
    canonicalize_body,
    encode_filename,
    msg_hash,
    parse_filename,
)
from .metastore import Condition, Metastore
from .query import ResultSet, execute_sql

__version__ = "0.1.0"

__all__ = [
    "CniCloudError",
    "Condition",
    "DuplicateFile",
    "FileRecord",
    "InvalidToken",
    "IoFailure",
    "LogFileKey",
    "MalformedBlock",
    "MalformedName",
    "MessageBody",
    "Metastore",
    "MsgRecord",
    "QueryError",
    "ResultSet",
    "StaleIndex",
    "UnknownFile",
    "canonicalize_body",
    "encode_filename",
    "execute_sql",
    "msg_hash",
    "parse_filename",
]
