"""Exception hierarchy.

Everything derives from :class:`WarpKNNError`. Errors caused by bad input data
(as opposed to bad command-line usage) also derive from :class:`DataError`,
which the CLI maps to exit code 2.
"""


class WarpKNNError(Exception):
    pass


class DataError(WarpKNNError, ValueError):
    pass


class InvalidSeries(DataError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class SeriesTooShort(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class UnsortedDistances(DataError):
    pass


class KTooLarge(DataError):
    pass


class EmptyTrainingSet(DataError):
    pass


class TooManyFolds(DataError):
    pass


class EmptyClass(DataError):
    pass


class EmptyFile(DataError):
    pass


class MalformedRow(DataError):
    def __init__(self, path, row, found, expected):
        self.path, self.row, self.found, self.expected = path, row, found, expected
        super().__init__(f"{path}: row {row} has {found} fields, expected {expected}")


class NonFiniteValue(DataError):
    def __init__(self, path, row, column):
        self.path, self.row, self.column = path, row, column
        super().__init__(f"{path}: non-finite value at row {row}, column {column}")


class UnknownInstanceId(DataError):
    pass


class ManifestError(DataError):
    pass


class PairFailure(DataError):
    def __init__(self, a, b, cause):
        self.pair = (a, b)
        super().__init__(f"distance between {a!r} and {b!r} failed: {cause}")
