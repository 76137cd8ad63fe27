"""Regularized distance functions with checked derivative bounds."""

from ._core import (
    Error,
    RegularizedDistance,
    Scene,
    distance_to_w,
    lambda_eps,
    load_scene,
    parse_scene,
    regularized_distance,
    run,
    subcommands,
)

__all__ = [
    "Error",
    "RegularizedDistance",
    "Scene",
    "distance_to_w",
    "lambda_eps",
    "load_scene",
    "parse_scene",
    "regularized_distance",
    "run",
    "subcommands",
]
