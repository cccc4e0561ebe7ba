from typing import Any, NamedTuple


class Check(NamedTuple):
    """Outcome of a yes/no test, with a witness when it fails (or succeeds, for searches)."""

    ok: bool
    witness: Any = None

    def __bool__(self):
        return bool(self.ok)
