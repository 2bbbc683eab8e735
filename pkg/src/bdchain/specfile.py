"""Chain specification files.

::

    # Fibonacci chain
    lambda = -1
    K = 0
    b: const 1
    m: const 1
    W: const 0

``b``, ``m`` and ``W`` are required exactly once; ``lambda`` and ``K`` are
optional.  Families follow :func:`bdchain.sequences.parse_family`, ``#``
starts a comment, and unknown or repeated keys are errors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .chain import BirthDeathChain
from .errors import BDChainError, SpecFileError
from .sequences import format_scalar, parse_family, to_scalar

_SCALAR_LINE = re.compile(r"^(lambda|K)\s*=\s*(\S+)$")
_FAMILY_LINE = re.compile(r"^(b|m|W)\s*:\s*(.*)$")


@dataclass(frozen=True)
class ChainSpec:
    chain: BirthDeathChain
    lam: Optional[Fraction] = None
    K: Optional[Fraction] = None

    def with_overrides(self, lam=None, K=None) -> ChainSpec:
        """Command-line values win over the file."""
        return replace(
            self,
            lam=self.lam if lam is None else to_scalar(lam),
            K=self.K if K is None else to_scalar(K),
        )

    def summary_lines(self) -> list:
        """Spec-file text for the chain and the effective ``lambda``/``K``; reparses to an equal spec."""
        lines = self.chain.summary_lines()
        if self.lam is not None:
            lines.append(f"lambda = {format_scalar(self.lam)}")
        if self.K is not None:
            lines.append(f"K = {format_scalar(self.K)}")
        return lines


def parse_spec(text: str, source: str = "<spec>") -> ChainSpec:
    found = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        match = _SCALAR_LINE.match(line) or _FAMILY_LINE.match(line)
        if match is None:
            key = re.split(r"[\s:=]", line, maxsplit=1)[0]
            raise SpecFileError(f"{where}: unknown or malformed entry {key!r}")
        key, value = match.groups()
        if key in found:
            raise SpecFileError(f"{where}: duplicate key {key!r}")
        try:
            found[key] = to_scalar(value) if key in ("lambda", "K") else parse_family(value.split())
        except BDChainError as exc:
            raise SpecFileError(f"{where}: {exc}") from None
    missing = [k for k in ("b", "m", "W") if k not in found]
    if missing:
        raise SpecFileError(f"{source}: missing required key(s) {', '.join(missing)}")
    chain = BirthDeathChain(found["b"], found["m"], found["W"])
    return ChainSpec(chain, found.get("lambda"), found.get("K"))


def load_spec(path) -> ChainSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_spec(text, str(path))
