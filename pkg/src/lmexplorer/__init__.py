"""Local-minima explorer for planar multi-robot motion planning.

Core pipeline: a scene (2D workspace + robots) is reduced through a
sequence of per-robot component projections; sparse roadmaps are grown
per level, candidate paths are optimized to local minima, and minima
across levels are organized into a tree linked by projection
equivalence.  A FastAPI service and a CLI wrap the core package.
"""

__version__ = "0.1.0"
