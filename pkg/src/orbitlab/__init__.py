"""orbitlab: a desk-scale laboratory for periodic orbits of polynomial maps."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .polymap import PolyMap, load_map, map_from_dict, model_map, save_map

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "PolyMap",
    "load_map",
    "map_from_dict",
    "model_map",
    "save_map",
    "__version__",
]
