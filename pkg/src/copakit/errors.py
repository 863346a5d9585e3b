"""Exception types shared across the package.

Everything raised on bad input data derives from :class:`CopaKitError`
so the command line layer can map any of them to a single exit code.
"""


class CopaKitError(Exception):
    """Base class for all errors raised by this package."""


class DataError(CopaKitError):
    """Malformed instance records, files, or dataset layouts."""


class TableError(CopaKitError):
    """Bad transliteration table file or entry."""


class RulesetError(CopaKitError):
    """Bad rewrite rule file, or a ruleset that cannot terminate."""


class AugmentError(CopaKitError):
    """Reversal, mixing, or upsampling called on unsuitable data."""


class AlignmentError(AugmentError):
    """Datasets that were supposed to be parallel are not."""


class RecipeError(CopaKitError):
    """Bad recipe file or a recipe referencing unknown blocks."""


class PromptError(CopaKitError):
    """Prompt rendering or exemplar selection failure."""


class ScoringError(CopaKitError):
    """Gold/prediction mismatch or an external predictor failure."""
