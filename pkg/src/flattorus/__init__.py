"""Least-distortion Euclidean embeddings of flat tori R^n/L.

Modules:

* ``lattice``  bases, duals, reduction, Voronoi cells, covering radius
* ``postype``  positive-type weight functions, feasibility, support reduction
* ``embed2d``  the exact planar pipeline and its dual certificate
* ``bounds``   closed-form lower bounds and orthogonal composition
* ``contour``  distortion-function samples for contour plots
* ``io``, ``cli``  JSON formats and the ``flattorus`` command
"""

__version__ = "0.1.0"
