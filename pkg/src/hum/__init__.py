"""hum: interactive probabilistic inference over a truth-maintenance network."""

__version__ = "0.1.0"

from .errors import (AtmsError, ContradictoryEvidenceError, HumError,
                     ModelError, ParseError)
from .model import Engine
from .session import Session

__all__ = ["Engine", "Session", "HumError", "AtmsError", "ModelError",
           "ParseError", "ContradictoryEvidenceError", "__version__"]
