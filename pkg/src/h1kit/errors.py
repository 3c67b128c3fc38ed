"""Exception hierarchy shared by all h1kit modules."""


class H1KitError(Exception):
    """Base class for all errors raised by h1kit."""


class SpecParse(H1KitError):
    """A group/module/datum spec could not be parsed."""


class InvalidTable(H1KitError):
    """A multiplication table violates the group axioms."""


class InvalidAction(H1KitError):
    """An action is not a homomorphism into the automorphism group."""


class CapExceeded(H1KitError):
    """A size or enumeration cap was exceeded."""


class RelationNotInSpan(H1KitError):
    """Relation rows do not lie in the span of the generator rows."""


class NotASubgroup(H1KitError):
    """The given element set is not a subgroup of the stated parent."""


class IncompatibleActions(H1KitError):
    """Two actions that must be compatible for twisting are not."""


class ActionMismatch(H1KitError):
    """A map was applied to data carrying a different action than required."""


class NotFixed(H1KitError):
    """The group element is not fixed by the acting group."""


class NotTame(H1KitError):
    """A tame local datum has residue size not coprime to the inertia bound."""


class IncongruentResidues(H1KitError):
    """Two local data cannot be compared: residue sizes differ mod n."""


class NotSupported(H1KitError):
    """A comparison or operation outside the supported model."""
