"""Procedural planet and terrain meshes with crack-free quadtree LOD."""

import json

from . import _core
from ._core import (
    ConfigError,
    ConsistencyError,
    FormatError,
    HeightField,
    InvalidArgument,
    OutOfDomain,
    diamond_square,
    import_heightfield,
    perlin3,
    set_worker_count,
    triplanar_weights,
    worker_count,
)

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "FormatError",
    "HeightField",
    "InvalidArgument",
    "OutOfDomain",
    "build_mesh",
    "config_hash",
    "diamond_square",
    "fbm3",
    "generate_fbm_heightfield",
    "import_heightfield",
    "load_config",
    "normalize_config",
    "octave_bound",
    "perlin3",
    "select_lod",
    "set_worker_count",
    "triplanar_weights",
    "validate_mesh",
    "worker_count",
]


def _text(config):
    if config is None:
        config = {"schema": 1}
    return config if isinstance(config, str) else json.dumps(config)


def load_config(path):
    """Read a run config file into a dict (relative heightmap paths are kept as written)."""
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def normalize_config(config=None):
    """Return the config with every default filled in."""
    return json.loads(_core.normalize_config(_text(config)))


def config_hash(config=None):
    return _core.config_hash(_text(config))


def fbm3(x, y, z, spec=None):
    return _core.fbm3(x, y, z, _text(spec or {}))


def octave_bound(spec=None):
    return _core.octave_bound(_text(spec or {}))


def generate_fbm_heightfield(spec, width, height, horizontal_extent):
    return _core.generate_fbm_heightfield(_text(spec), width, height, horizontal_extent)


def select_lod(config=None, camera=None):
    """Active leaves as (face, level, i, j, neighbour_levels) tuples."""
    return _core.select_lod(_text(config), camera)


def build_mesh(config=None, camera=None):
    """Select, tessellate, weld and shade one frame.

    Returns a dict of numpy arrays (world, positions, normals, colors,
    triangles) plus rebase_origin, and the frame stats and mesh audit as dicts.
    """
    out = _core.build_mesh(_text(config), camera)
    out["stats"] = json.loads(out["stats"])
    out["audit"] = json.loads(out["audit"])
    return out


def validate_mesh(path, allow_open=False):
    """Audit a mesh or report file. Returns (exit_code, report dict)."""
    code, report = _core.validate_mesh(str(path), allow_open)
    return code, json.loads(report)
