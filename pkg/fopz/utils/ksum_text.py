import re
from pathlib import Path
from typing import Dict, Union

from fopz.services.ksum import KSumInstance
from fopz.utils.errors import KSumFormatError

ENTRY_PATTERN = re.compile(r'^(-?\d+)(?::(\d+))?$')


def dumps(inst: KSumInstance) -> str:
    """Render an instance in the k-SUM text format.

    Line 1 is "k t"; each of the next k lines lists entries "value" or
    "value:multiplicity" separated by spaces.

    Args:
        inst: instance to render

    Returns:
        Text ending in a newline
    """
    lines = [f"{inst.k} {inst.target}"]
    for lst in inst.lists:
        lines.append(" ".join(str(v) if m == 1 else f"{v}:{m}" for v, m in lst))
    return "\n".join(lines) + "\n"


def loads(text: str) -> KSumInstance:
    """Parse the k-SUM text format.

    Args:
        text: instance text

    Returns:
        KSumInstance; duplicate values within one line are rejected
    """
    lines = text.splitlines()
    if not lines:
        raise KSumFormatError("empty k-SUM file")

    header = lines[0].split()
    if len(header) != 2 or not all(re.fullmatch(r'-?\d+', token) for token in header):
        raise KSumFormatError(f"line 1: expected 'k t', got {lines[0]!r}")
    k, target = int(header[0]), int(header[1])
    if k < 2:
        raise KSumFormatError(f"line 1: k must be >= 2, got {k}")

    body = lines[1:]
    if len(body) < k or any(line.strip() for line in body[k:]):
        raise KSumFormatError(f"expected exactly {k} list lines after the header")

    lists = []
    for lineno, line in enumerate(body[:k], start=2):
        entries: Dict[int, int] = {}
        for token in line.split():
            match = ENTRY_PATTERN.match(token)
            if not match:
                raise KSumFormatError(f"line {lineno}: malformed entry {token!r}")
            value = int(match.group(1))
            multiplicity = int(match.group(2)) if match.group(2) else 1
            if multiplicity < 1:
                raise KSumFormatError(f"line {lineno}: multiplicity of {value} must be >= 1")
            if value in entries:
                raise KSumFormatError(f"line {lineno}: duplicate value {value}")
            entries[value] = multiplicity
        lists.append(entries)
    return KSumInstance.from_weighted(lists, target)


def read(path: Union[str, Path]) -> KSumInstance:
    try:
        return loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise KSumFormatError(f"cannot read {path}: {e}") from e


def write(inst: KSumInstance, path: Union[str, Path]):
    Path(path).write_text(dumps(inst), encoding="utf-8")
