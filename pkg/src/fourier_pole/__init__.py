"""Pole estimation for rotating bodies from stacked silhouette images.

The in-plane pole angle of each camera view is the direction of strongest
mirror symmetry in the amplitude spectrum of co-added silhouettes; several
views are then combined by least squares into a 3D pole.
"""

from .errors import (ConfigError, DegenerateGeometryError, DegenerateImageError,
                     FieldOfViewError, MeshError, PoleEstimationError)
from .geometry import (CameraFrame, CameraView, OrthographicIntrinsics, PinholeIntrinsics,
                       SphericalPosition, camera_matrix, hover_frame, look_at_frame,
                       project_point, true_pole_projection_angle)
from .mesh import TriangleMesh, generate_test_shape, load_obj, rotate_body, save_obj
from .render import (RenderConfig, SilhouetteImage, SunState, brightness_centroid,
                     render_batch, render_silhouette, sun_from_phase, sun_phase_angle)
from .spectral import (amplitude_spectrum, disambiguate, estimate_in_plane_angle,
                       expand_pole_hypotheses, low_pass_crop, log_compress, reflect_vertical,
                       rotate_image_nn, symmetry_score)
from .stack import StackImage, circular_shift, co_add, register_frames, symmetric_decomposition
from .triangulation import InPlaneMeasurement, PoleEstimate, pole_error, triangulate

__version__ = "0.1.0"
