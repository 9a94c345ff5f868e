"""Exception types shared across the package."""


class KlabError(Exception):
    """Base class for all package errors."""


class SingularPoint(KlabError):
    """Evaluation requested at a point lying on the singular set."""


class OutsideCover(KlabError):
    """Partition-of-unity evaluation outside the covered region."""


class CoverageGap(KlabError):
    """Whitney enumeration left an unexpectedly large region uncovered."""

    def __init__(self, message, uncovered_volume):
        super().__init__(message)
        self.uncovered_volume = uncovered_volume


class InvalidParams(KlabError):
    """Parameters outside the validity range of a decision or norm."""


class Unsupported(KlabError):
    """Requested order/depth beyond what the implementation provides."""


class EmptyFamily(KlabError):
    """A verification experiment received no admissible test functions."""


class UndeterminedByPaper(KlabError):
    """The requested parameter range falls outside the proved statements."""
