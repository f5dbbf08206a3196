"""Deterministic verification reports.

Reports carry the command echo, the input digest, every numeric verdict
together with the tolerance it was judged against, and render to either a
human-readable text block or a line-oriented ``key=value`` machine format
with floats at 17 significant digits.  No timestamps or environment state:
identical inputs and flags produce byte-identical output.
"""

from __future__ import annotations

import numpy as np


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


class Report:
    """Ordered key-value report with sections."""

    def __init__(self, command: str, spec_digest: str, tolerances: dict | None = None):
        self.entries: list[tuple[str, object]] = [("command", command), ("spec_sha256", spec_digest)]
        for name in sorted(tolerances or {}):
            self.entries.append((f"tol.{name}", float(tolerances[name])))
        self.verdict: str = "ok"

    def add(self, key: str, value) -> None:
        if isinstance(value, np.ndarray):
            for i, x in enumerate(np.atleast_1d(value)):
                self.entries.append((f"{key}.{i}", float(x)))
        elif isinstance(value, complex):
            self.entries.append((f"{key}.re", float(value.real)))
            self.entries.append((f"{key}.im", float(value.imag)))
        else:
            self.entries.append((key, value))

    def add_check(self, key: str, value: float, tol: float) -> None:
        """A numeric verdict always travels with its tolerance."""
        self.entries.append((f"check.{key}.value", float(value)))
        self.entries.append((f"check.{key}.tol", float(tol)))
        self.entries.append((f"check.{key}.pass", bool(abs(value) <= tol)))

    def set_verdict(self, verdict: str) -> None:
        self.verdict = verdict

    def render(self, fmt: str = "text") -> str:
        if fmt == "machine":
            lines = [f"{k}={_fmt_value(v)}" for k, v in self.entries]
            lines.append(f"verdict={self.verdict}")
            return "\n".join(lines) + "\n"
        if fmt != "text":
            raise ValueError(f"unknown format {fmt!r}")
        width = max(len(k) for k, _ in self.entries)
        lines = [f"{k.ljust(width)}  {_fmt_value(v)}" for k, v in self.entries]
        lines.append(f"{'verdict'.ljust(width)}  {self.verdict}")
        return "\n".join(lines) + "\n"


def parse_machine(text: str) -> dict:
    """Inverse of the machine rendering (for round-trip checks)."""
    out = {}
    for line in text.strip().splitlines():
        k, _, v = line.partition("=")
        out[k] = v
    return out
