"""Exception types shared across the package."""


class MonodromicError(Exception):
    pass


class AmbientMismatch(MonodromicError):
    pass


class NotPreserved(MonodromicError):
    pass


class NotNilpotent(MonodromicError):
    pass


class InvalidCore(MonodromicError):
    pass


class IrrationalEigenvalue(MonodromicError):
    pass


class WindowTooSmall(MonodromicError):
    pass


class NotAMorphism(MonodromicError):
    pass


class InvalidMMHM(MonodromicError):
    pass


class InvalidGluing(MonodromicError):
    pass


class EigenvalueDenominatorMismatch(MonodromicError):
    pass


class SchemaError(MonodromicError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class ParseError(MonodromicError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
