"""Fracrot: fractional partial derivatives of planar fields under SO(2) rotation."""

__version__ = "1.0.0"

# Engine defaults, exposed to the command line through the invoke configuration layers.
default_settings = {
    "nodes": 64,
    "levels": 16,
    "panel_nodes": 16,
    "precision": 10,
    "format": "csv",
    "output": "",
    "alpha": 0.5,
    "axis": "x",
    "kind": "rl",
    "field": "r2",
    "library": "",
    "tolerance": 1e-10,
    "log_level": "WARNING",
}
