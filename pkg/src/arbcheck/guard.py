"""Work budgets for the enumeration-heavy checks."""

from __future__ import annotations

from .errors import SizeGuardExceeded

DEFAULT_GUARD = 4096


class Budget:
    """Counts LP solves and cone-enumeration steps against a hard cap."""

    def __init__(self, limit: int = DEFAULT_GUARD, label: str = ""):
        self.limit = limit
        self.used = 0
        self.label = label

    def charge(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise SizeGuardExceeded(
                f"{self.label or 'check'}: budget of {self.limit} exceeded"
            )


def unlimited() -> Budget:
    return Budget(limit=1 << 62, label="unlimited")
