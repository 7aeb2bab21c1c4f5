"""Error hierarchy shared by every analysis module.

Input problems exit the CLI with status 2, numerical failures with status 3.
"""
from typing import Any, Dict


class LatticeError(Exception):
    exit_code = 1

    def __init__(self, message: str, **fields: Any):
        super().__init__(message)
        self.message = message
        self.fields = fields

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form written to stderr by the CLI."""
        payload: Dict[str, Any] = {"error": type(self).__name__, "message": self.message}
        payload.update(self.fields)
        return payload


class InputError(LatticeError):
    exit_code = 2


class NumericalError(LatticeError):
    exit_code = 3


# Input errors

class InvalidUniverse(InputError):
    def __init__(self, reason: str):
        super().__init__(f"Invalid component universe: {reason}", reason=reason)


class UniverseTooLarge(InputError):
    def __init__(self, size: int, limit: int):
        super().__init__(f"Universe has {size} components, limit is {limit}", size=size, limit=limit)


class UniverseMismatch(InputError):
    def __init__(self, left, right):
        super().__init__(
            f"Universes differ: {list(left)} vs {list(right)}",
            left=list(left),
            right=list(right),
        )


class UnknownComponent(InputError):
    def __init__(self, name: str):
        super().__init__(f"Unknown component: {name!r}", name=name)


class DuplicateComponent(InputError):
    def __init__(self, name: str):
        super().__init__(f"Component listed twice: {name!r}", name=name)


class MissingCoalition(InputError):
    def __init__(self, mask: int):
        super().__init__(f"Coalition with mask {mask} is not in the table", mask=mask)


class MemberAlreadyPresent(InputError):
    def __init__(self, name: str):
        super().__init__(f"Component {name!r} is already in the coalition", name=name)


class IncompleteTable(InputError):
    def __init__(self, count_present: int, count_required: int):
        super().__init__(
            f"Table holds {count_present} of {count_required} coalitions",
            count_present=count_present,
            count_required=count_required,
        )


class IncompleteMatrix(InputError):
    def __init__(self, missing: int):
        super().__init__(f"Task matrix is missing {missing} required coalition columns", missing=missing)


class TooFewUnits(InputError):
    def __init__(self, count: int, required: int):
        super().__init__(f"Need at least {required} units, got {count}", count=count, required=required)


class TooFewRows(InputError):
    def __init__(self, rows: int, params: int):
        super().__init__(f"{rows} rows cannot support {params} parameters", rows=rows, params=params)


class NotPairwiseFit(InputError):
    def __init__(self, order: str):
        super().__init__(f"Coupling analysis needs a pairwise fit, got order {order!r}", order=order)


class ParseError(InputError):
    def __init__(self, line: int, reason: str = "malformed input"):
        super().__init__(f"Parse error at line {line}: {reason}", line=line, reason=reason)


class DuplicateCoalition(InputError):
    def __init__(self, mask: int, line: int):
        super().__init__(f"Coalition with mask {mask} repeated at line {line}", mask=mask, line=line)


class NonFiniteValue(InputError):
    def __init__(self, line: int):
        super().__init__(f"Non-finite value at line {line}", line=line)


class InvalidArgument(InputError):
    def __init__(self, reason: str):
        super().__init__(reason, reason=reason)


class ChecksumMismatch(InputError):
    def __init__(self, name: str, expected: str, actual: str):
        super().__init__(f"Fixture {name} does not match its pinned checksum", name=name, expected=expected, actual=actual)


# Numerical errors

class AllZero(NumericalError):
    def __init__(self):
        super().__init__("All Shapley values are zero; shares are undefined")


class RankDeficient(NumericalError):
    def __init__(self, column: str):
        super().__init__(f"Design matrix is rank deficient at column {column!r}", column=column)


class LeverageOne(NumericalError):
    def __init__(self, row: int):
        super().__init__(f"Observation {row} has leverage 1; leave-one-out is undefined", row=row)


class ZeroRSS(NumericalError):
    def __init__(self):
        super().__init__("Residual sum of squares is zero; information criteria are -inf")


class ZeroVariance(NumericalError):
    def __init__(self):
        super().__init__("Values have zero variance")


class AllZeroDifferences(NumericalError):
    def __init__(self):
        super().__init__("All paired differences are zero")


class IntegrationFailure(NumericalError):
    def __init__(self, detail: str):
        super().__init__(f"Numerical integration did not converge: {detail}", detail=detail)


class NoDiscordantPairs(NumericalError):
    def __init__(self):
        super().__init__("McNemar test needs at least one discordant pair")
