"""
Indicator roster files: one spec per line, ``name(param=value,...)``.

Blank lines and ``#`` comments are ignored. A bare ``name`` or ``name()``
uses the registry defaults.
"""

import re
from pathlib import Path
from typing import Iterable, List, Optional, Union

from indicator_selection.exceptions import SchemaError
from indicator_selection.indicators.registry import NATIVE_REGISTRY, IndicatorRegistry, IndicatorSpec

_SPEC_RE = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*(?:\((?P<args>[^()]*)\))?$")
_ARG_RE = re.compile(r"^(?P<key>[A-Za-z_][A-Za-z0-9_]*)\s*=\s*(?P<value>[-+0-9.eE]+)$")


def _number(text: str, line: str):
    try:
        value = float(text)
    except ValueError:
        raise SchemaError(f"roster: '{text}' is not a number in '{line}'") from None
    return int(value) if re.fullmatch(r"[-+]?\d+", text) else value


def parse_spec(line: str) -> IndicatorSpec:
    """Parse ``name(param=value,...)`` into an IndicatorSpec."""
    text = line.strip()
    match = _SPEC_RE.match(text)
    if not match:
        raise SchemaError(f"roster: cannot parse '{line}'")
    params = {}
    args = (match.group("args") or "").strip()
    if args:
        for item in args.split(","):
            arg = _ARG_RE.match(item.strip())
            if not arg:
                raise SchemaError(f"roster: bad parameter '{item.strip()}' in '{line}'")
            key = arg.group("key")
            if key in params:
                raise SchemaError(f"roster: parameter '{key}' repeated in '{line}'")
            params[key] = _number(arg.group("value"), line)
    return IndicatorSpec(name=match.group("name"), params=params)


def parse_roster(lines: Iterable[str]) -> List[IndicatorSpec]:
    specs = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if line:
            specs.append(parse_spec(line))
    return specs


def load_roster(
    path: Union[str, Path], registry: Optional[IndicatorRegistry] = None
) -> List[IndicatorSpec]:
    """
    Read a roster file and check every name against the registry.

    Raises:
        SchemaError: unparseable line or empty roster
        UnknownIndicatorError: name not registered
    """
    registry = registry or NATIVE_REGISTRY
    specs = parse_roster(Path(path).read_text(encoding="utf-8").splitlines())
    if not specs:
        raise SchemaError(f"{path}: roster has no indicator specs")
    for spec in specs:
        registry.resolve(spec)
    return specs


def format_roster(specs: Iterable[IndicatorSpec]) -> str:
    return "".join(f"{spec}\n" for spec in specs)


def default_roster(registry: Optional[IndicatorRegistry] = None) -> List[IndicatorSpec]:
    """Every native indicator with its default parameters, in catalogue order."""
    return (registry or NATIVE_REGISTRY).default_specs()
