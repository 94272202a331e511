from __future__ import annotations

import json
import shutil
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional, TextIO

import tomli_w
import yaml


def to_json_text(payload: object) -> str:
    return json.dumps(payload, ensure_ascii=True, indent=2, sort_keys=True) + "\n"


def emit_json(payload: object, stream: Optional[TextIO] = None) -> None:
    (stream or sys.stdout).write(to_json_text(payload))


def write_json(path: Path, payload: object) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json_text(payload), encoding="utf-8")
    return path


def log_line(tag: str, message: str, stream: Optional[TextIO] = None) -> None:
    print(f"[{tag}] {message}", file=stream or sys.stderr)


def dump_toml(payload: dict[str, Any]) -> str:
    content = tomli_w.dumps(_drop_nulls(payload))
    if content.endswith("\n"):
        return content
    return f"{content}\n"


def dump_yaml(payload: Any) -> str:
    content = yaml.safe_dump(
        payload,
        allow_unicode=False,
        default_flow_style=False,
        sort_keys=False,
    )
    if content.endswith("\n"):
        return content
    return f"{content}\n"


def _drop_nulls(value: Any) -> Any:
    # TOML has no null
    if isinstance(value, dict):
        return {key: _drop_nulls(item) for key, item in value.items() if item is not None}
    if isinstance(value, list):
        return [_drop_nulls(item) for item in value]
    return value


@contextmanager
def staged_output_dir(target: Path) -> Iterator[Path]:
    """Yield a scratch directory next to ``target``; it replaces ``target`` only on success."""
    target = target.expanduser().resolve()
    target.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{target.name}.staging-", dir=str(target.parent)))
    try:
        yield staging
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    if target.exists():
        shutil.rmtree(target)
    staging.rename(target)
