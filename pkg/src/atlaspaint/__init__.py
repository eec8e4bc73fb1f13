"""atlaspaint: Blender-free brain-atlas rendering pipeline.

Ingests per-region atlas meshes plus per-region biomarker values, colors
regions through a user gradient, and renders named anatomical views with a
built-in software rasterizer.  Usable as a library, a CLI (`atlaspaint`),
and an HTTP render service.
"""

__version__ = "0.1.0"

from .mesh import Mesh, compute_vertex_normals
from .ply import parse_ply, write_ply
from .colormap import ColorGradient, parse_hex_color, value_to_color

__all__ = [
    "Mesh",
    "compute_vertex_normals",
    "parse_ply",
    "write_ply",
    "ColorGradient",
    "parse_hex_color",
    "value_to_color",
    "__version__",
]
