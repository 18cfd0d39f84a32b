"""Exception hierarchy shared by the library and the command line."""


class CarpetQuantError(Exception):
    """Base class for every error raised by :mod:`carpetquant`."""


class InputError(CarpetQuantError, ValueError):
    """An argument is outside the domain of the operation."""


class ResourceError(CarpetQuantError):
    """The request would exceed a configured size limit."""


class AmbiguousCellError(CarpetQuantError):
    """A cylinder could not be assigned to a single Voronoi cell by the depth cap."""

    def __init__(self, word, candidates):
        self.word = word
        self.candidates = tuple(candidates)
        super().__init__(
            f"cylinder {word or '<root>'} still meets cells {self.candidates} at the depth cap"
        )


class DegenerateCellError(CarpetQuantError):
    """A Lloyd step left a site with no mass; carries the offending site index."""

    def __init__(self, site):
        self.site = site
        super().__init__(f"site {site} captured no atoms; restart from a new initial codebook")
