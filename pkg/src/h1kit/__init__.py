"""h1kit: exact finite-group and tame local Galois cohomology at desk scale.

Subpackages by layer: zmodlinalg (exact linear algebra over Z/m), groups
(finite groups and subgroup machinery), gmodules (finite modules with group
action), abelian (abelian H^1, Tate H^0-hat and restriction kernels),
nonabelian (cocycle classes, twisting, fibers), localtame (tame local class
sets), catalog (named test groups), cli (reports).
"""

from ._kernels import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
