"""Lightweight warning/counter sink threaded through mining and matching."""
from __future__ import annotations

from collections import Counter


class Diagnostics:
    """Collects non-fatal observations (malformed literals, skipped terms, ...).

    Every entry has a short machine-readable code; messages are free-form.
    Passing None wherever a Diagnostics is accepted silently drops entries.
    """

    def __init__(self):
        self.counts = Counter()
        self.messages: list[tuple[str, str]] = []

    def warn(self, code: str, message: str = ""):
        self.counts[code] += 1
        # keep a bounded number of full messages so a pathological input
        # cannot balloon memory
        if len(self.messages) < 1000:
            self.messages.append((code, message))

    def merge(self, other: "Diagnostics"):
        self.counts.update(other.counts)
        self.messages.extend(other.messages[: 1000 - len(self.messages)])


def warn(diagnostics: Diagnostics | None, code: str, message: str = ""):
    if diagnostics is not None:
        diagnostics.warn(code, message)
