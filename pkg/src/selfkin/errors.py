"""Error type shared by all selfkin modules.

Every failure mode carries a short machine-readable code (e.g. "shape-mismatch",
"unknown-face-id") so callers and the CLI can branch on it without string-matching
prose messages.
"""


class SelfKinError(ValueError):
    """Raised on contract violations; ``code`` identifies the failure mode."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
