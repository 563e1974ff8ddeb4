"""YAML load/dump with the settings every on-disk document in this package uses."""

from __future__ import annotations

from typing import Any

import yaml

from .errors import ParseError

_Loader = getattr(yaml, "CSafeLoader", yaml.SafeLoader)
_Dumper = getattr(yaml, "CSafeDumper", yaml.SafeDumper)


def load(text: str | bytes, what: str = "document", line_offset: int = 0) -> Any:
    """Parse YAML; ``line_offset`` shifts reported lines for embedded blocks."""
    try:
        return yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1 + line_offset}, column {mark.column + 1}" if mark else None
        raise ParseError(f"invalid YAML in {what}: {exc.problem}", where) from None
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML in {what}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"{what} is not valid UTF-8: {exc.reason}") from None


def dump(data: Any) -> str:
    return yaml.dump(
        data,
        Dumper=_Dumper,
        sort_keys=False,
        allow_unicode=True,
        default_flow_style=False,
        width=100_000,
    )
