"""Error types shared across the package."""


class IntegrityError(Exception):
    """A cross-check between two independent computations failed.

    Raised when redundant routes to the same quantity disagree: the two
    expansions of the weight-12 form, a character sum with a non-rational
    residue, or a cache payload that does not match its header.  Never
    caught internally; a failed cross-check always aborts the computation.
    """
