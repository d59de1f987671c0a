"""JSON document helpers with diagnostics that name the file and location."""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from ..errors import DocumentError

logger = logging.getLogger(__name__)

M = TypeVar('M', bound=BaseModel)

PathLike = Union[str, Path]


def _format_location(loc) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def describe_validation_error(source: str, error: ValidationError) -> str:
    """Render a pydantic error as ``source: path: message`` lines."""
    lines = [
        f"{source}: {_format_location(item['loc'])}: {item['msg']}"
        for item in error.errors()
    ]
    return "\n".join(lines)


def read_json(path: PathLike) -> Any:
    """Read a JSON document.

    Args:
        path: File to read

    Returns:
        The decoded document

    Raises:
        DocumentError: If the file is unreadable or not valid JSON
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"{path}: cannot read file: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e


def validate_document(source: str, data: Any, model: Type[M], context: Optional[dict] = None) -> M:
    """Validate decoded JSON against ``model``, naming ``source`` on failure."""
    try:
        return model.model_validate(data, context=context)
    except ValidationError as e:
        raise DocumentError(describe_validation_error(source, e)) from e


def load_model(path: PathLike, model: Type[M]) -> M:
    """Read ``path`` and validate it as ``model``."""
    return validate_document(str(path), read_json(path), model)


def write_json(data: Any, path: Optional[PathLike] = None) -> None:
    """Write ``data`` as indented JSON to ``path``, or stdout when ``None``."""
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json")
    text = json.dumps(data, indent=2, sort_keys=False) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
