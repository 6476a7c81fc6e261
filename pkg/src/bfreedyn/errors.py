"""Exception hierarchy shared by all modules."""


class DomainError(Exception):
    """Base class for errors caused by invalid mathematical input."""

    code = "DomainError"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class DuplicateModulus(DomainError):
    code = "DuplicateModulus"


class ModulusTooSmall(DomainError):
    code = "ModulusTooSmall"


class UnknownTail(DomainError):
    code = "UnknownTail"


class InvalidWindow(DomainError):
    code = "InvalidWindow"


class IncompatibleResidues(DomainError):
    code = "IncompatibleResidues"


class LevelMismatch(DomainError):
    code = "LevelMismatch"


class LcmOverflow(DomainError):
    code = "LcmOverflow"


class TailNotEnumerable(DomainError):
    code = "TailNotEnumerable"


class ExponentialBlowup(DomainError):
    code = "ExponentialBlowup"


class CenterOutOfRange(DomainError):
    code = "CenterOutOfRange"


class BlockExceedsLevel(DomainError):
    code = "BlockExceedsLevel"


class RationalRotation(DomainError):
    code = "RationalRotation"
