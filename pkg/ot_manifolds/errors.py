"""Exception hierarchy shared by the certification modules."""


class OTError(Exception):
    """Base class for every error raised by ot_manifolds."""
    pass


class PolynomialError(OTError):
    """Invalid polynomial input or division by the zero polynomial."""
    pass


class EndpointRootError(PolynomialError):
    """A Sturm count endpoint is a root; the caller must perturb it."""
    pass


class FieldError(OTError):
    """The defining polynomial cannot define a number field here."""
    pass


class RootCertificationError(FieldError):
    """Root disks could not be separated before the precision cap."""
    pass


class NotAUnitError(OTError):
    """An element expected to be a unit is not one."""
    pass


class CompletionError(OTError):
    """Greedy basis completion could not reach full rank."""

    def __init__(self, message: str, partial=()):
        super().__init__(message)
        self.partial = tuple(partial)


class GroupElementError(OTError):
    """Invalid group element for the requested operation."""
    pass


class ActionDomainError(OTError):
    """A point left the domain H^s x C^t."""
    pass


class LeafCertificationError(OTError):
    """Leaf disjointness could not be certified at any allowed precision."""
    pass


class InoueConstructionError(OTError):
    """The matrix or unit does not produce an Inoue surface of type S0."""
    pass


class SubfieldError(OTError):
    """The candidate element does not generate a usable proper subfield."""
    pass


class RestrictionMatchError(OTError):
    """Embeddings of K could not be matched unambiguously to those of K1."""
    pass


class InclusionError(OTError):
    """The subfield inclusion produced an inconsistent image."""
    pass
