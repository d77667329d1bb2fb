"""Exception and warning types shared across the package."""


class AniRabiError(Exception):
    """Base class for library errors."""


class PoleHit(AniRabiError):
    """A series evaluation ran into a (near-)vanishing recurrence denominator.

    This signals that the trial spectral parameter is a pole candidate; it is
    not a failure of the library.  ``branch`` is "forward" or "backward",
    ``step`` the recurrence index at which the guard tripped.
    """

    def __init__(self, branch, step, magnitude):
        self.branch = branch
        self.step = step
        self.magnitude = magnitude
        super().__init__(
            f"{branch} recurrence guard tripped at n={step} (|denom|~{magnitude:.3e})"
        )


class NotConverged(AniRabiError):
    """A coefficient table or series sum did not pass its tail test."""


class TruncationError(AniRabiError):
    """A Fock-space expansion leaks past the truncation cutoff."""


class SolverError(AniRabiError):
    """A root search or eigensolve failed to produce a usable result."""


class FlatObjectiveWarning(UserWarning):
    """The fit objective barely varies across the search grid."""
