"""Lines on quartic surfaces with non-simple double points, over finite fields."""
from .field import FieldSpec, field_make
from .poly import MultiPoly, parse_polynomial
from .geom import ProjLine, ProjPoint
from .surface import QuarticSurface, load_surface

__all__ = ["FieldSpec", "field_make", "MultiPoly", "parse_polynomial", "ProjLine", "ProjPoint",
           "QuarticSurface", "load_surface"]
__version__ = "0.1.0"
