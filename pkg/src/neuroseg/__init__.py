"""neuroseg: volumetric neuroimaging segmentation workbench."""

from .enhance import WindowLevel
from .segment import LabelMap
from .volume import ColorScheme, Volume3D

__version__ = "0.1.0"

__all__ = ["Volume3D", "LabelMap", "ColorScheme", "WindowLevel", "__version__"]
