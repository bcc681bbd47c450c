"""
Versioned binary model artifacts.

Layout: 8 magic bytes, one format-version byte, then the pickled
RegressorModel.
"""

import pickle
from pathlib import Path
from typing import Union

from indicator_selection.exceptions import ArtifactError
from indicator_selection.models.base import RegressorModel
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)

MAGIC = b"INDSELMD"
FORMAT_VERSION = 1


def dumps_model(model: RegressorModel) -> bytes:
    return MAGIC + bytes([FORMAT_VERSION]) + pickle.dumps(model, protocol=pickle.HIGHEST_PROTOCOL)


def loads_model(payload: bytes) -> RegressorModel:
    """
    Raises:
        ArtifactError: wrong magic, unsupported version or undecodable body
    """
    header = len(MAGIC)
    if len(payload) <= header or payload[:header] != MAGIC:
        raise ArtifactError("not a model artifact (bad magic bytes)")
    version = payload[header]
    if version != FORMAT_VERSION:
        raise ArtifactError(f"unsupported artifact format version {version} (expected {FORMAT_VERSION})")
    try:
        model = pickle.loads(payload[header + 1:])
    except Exception as exc:
        raise ArtifactError(f"corrupt model artifact: {exc}") from exc
    if not isinstance(model, RegressorModel):
        raise ArtifactError(f"artifact holds {type(model).__name__}, not a RegressorModel")
    return model


def save_model(model: RegressorModel, path: Union[str, Path]) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(dumps_model(model))
    logger.info("model saved", family=model.family, path=str(out))
    return out


def load_model(path: Union[str, Path]) -> RegressorModel:
    source = Path(path)
    if not source.exists():
        raise ArtifactError(f"model artifact not found: {source}")
    return loads_model(source.read_bytes())
