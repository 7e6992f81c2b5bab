"""Winding helicity of magnetic fields between two horizontal planes.

Computes the winding helicity of a gridded field in two algebraically
independent forms, decomposes it into self and mutual contributions over
labelled subdomains, evaluates the thin-flux-tube closed forms, and
integrates the self/mutual helicity flux through a planar boundary.
"""

__version__ = "0.1.0"

from .analytic import (ArchSpec, DomeSpec, TubeSpec, add_fields, arch_pair_curves,
                       azimuthal_twist, disk_coverage, dome_field, double_helix_pair,
                       rotating_patch_series, twisted_tube, uniform_vertical)
from .errors import (CoincidentPointsError, FieldFormatError, OutOfDomainError,
                     RegimeError, UndersampledAngleError, WindhelError)
from .fieldline import (CLOSED, OPEN, UNDETERMINED, MonotoneSegment, Polyline3,
                        classify_connectivity, load_curves, partition_monotone,
                        save_curves, trace)
from .flux import (CFieldSlice, PlaneGrid, PlanarSeries, c_field, flux_decompose,
                   flux_total, footpoint_velocity, load_series, save_series,
                   series_from_field)
from .grid import (Grid3, SliceField, VectorField3, divergence_max, load_field,
                   make_field, sample, save_field, slice_at)
from .helicity import (HelicityReport, decompose, helicity_gauge_form,
                       helicity_pairwise_form, relative_helicity, winding_bilinear,
                       winding_gauge_slice)
from .regions import RegionMask, label_open_closed, load_mask, save_mask
from .thintube import (ArchAngles, ThinTube, arch_angles, arch_mutual_helicity,
                       mutual_helicity_thin, self_helicity_thin)
from .winding import (WindingResult, footpoint_winding, polar_angle, unwrap,
                      winding_general, winding_monotone)
