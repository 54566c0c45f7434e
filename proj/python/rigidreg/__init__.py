"""Globally optimal rigid registration and reflective-symmetry detection."""

from ._rigidreg import (
    RigidMotion,
    correlation,
    decimate,
    detect_symmetry,
    inter_resolution_bound,
    read_image,
    register_rigid,
    upsample,
    __version__,
)

__all__ = [
    "RigidMotion",
    "correlation",
    "decimate",
    "detect_symmetry",
    "inter_resolution_bound",
    "read_image",
    "register_rigid",
    "upsample",
    "__version__",
]
