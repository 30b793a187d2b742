"""Offline producer of binary feature tables for multiple-choice questions.

Encodes each (question, option) pair with a frozen local transformer
encoder, takes the final-layer first-token state, concatenates the option
vectors in order, and writes the feature-binary format the downstream
classifier packages read. Stands alone: the only coupling to consumers is
the file format itself.
"""

from .encoder import EncoderConfig, FrozenEncoder, available_models
from .extract import extract, reduce_and_extract
from .records import QaRecord, load_records, reduce_record

__version__ = "0.1.0"

__all__ = [
    "EncoderConfig",
    "FrozenEncoder",
    "QaRecord",
    "available_models",
    "extract",
    "load_records",
    "reduce_and_extract",
    "reduce_record",
]
