"""Exception hierarchy shared by all bpmc modules."""

from __future__ import annotations


class BpmcError(Exception):
    """Base class for every error raised by bpmc."""


class ParseError(BpmcError):
    """Malformed input text. ``line`` and ``col`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)


class LtlSyntaxError(ParseError):
    def __init__(self, message: str, position: int):
        self.position = position
        ParseError.__init__(self, f"{message} at position {position}")


class UnknownAtom(ParseError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        ParseError.__init__(self, f"unknown atom {name!r}")


class ValidationError(BpmcError):
    """A branching process violates one or more invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class NotAnScc(BpmcError):
    pass


class StartNotInScc(BpmcError):
    pass


class StartInT(BpmcError):
    pass


class DimensionMismatch(BpmcError):
    pass


class NegativeEntry(BpmcError):
    pass


class NotIrreducible(BpmcError):
    pass


class AlphabetMismatch(BpmcError):
    pass


class PartialDpa(BpmcError):
    pass


class AnchorNotOnCycle(BpmcError):
    pass


class EmptyPeriod(BpmcError):
    pass


class BudgetExceeded(BpmcError):
    def __init__(self, what: str, limit: int):
        self.what = what
        self.limit = limit
        super().__init__(f"{what}: state budget of {limit} exceeded")


class AmbiguousAutomaton(BpmcError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"automaton is ambiguous: {witness}")


class EpsRulesNotSupported(BpmcError):
    pass


class CyclicCircuit(BpmcError):
    pass


class EmptyWord(BpmcError):
    pass
