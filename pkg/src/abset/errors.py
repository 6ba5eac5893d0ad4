"""Error types shared across the package.

The CLI maps these onto exit codes: usage problems exit 1, a named
invariant violation or an undecidable comparison exits 2.
"""


class UsageError(Exception):
    """Bad arguments or an operation applied outside its stated domain."""


class InvariantViolation(Exception):
    """A construction invariant failed an exact check.

    `name` identifies the invariant so the CLI can report which check
    broke without the caller parsing the message.
    """

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        self.detail = detail
        super().__init__(f"invariant violated: {name}" + (f": {detail}" if detail else ""))


class InsufficientPrecision(Exception):
    """An interval comparison could not be decided at the working precision.

    Raised instead of silently guessing; callers may retry at higher
    precision or surface the failure.
    """

    def __init__(self, context: str, detail: str = ""):
        self.context = context
        self.detail = detail
        super().__init__(f"insufficient precision: {context}" + (f": {detail}" if detail else ""))
