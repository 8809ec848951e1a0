"""Exact computations with Picard groups attached to the cyclic group C_n.

Modules, bottom-up: ``intlab`` (integer Smith normal form), ``burnside``
(Burnside ring and marks), ``picalg`` (Pic of the Burnside ring), ``mackey``
(invertible Mackey functors), ``spectra`` (Pic of C_n-spectra), ``homology``
(cellular chains computing pi_0), ``zmodpic`` (modules over constant Z).
"""

__version__ = "0.1.0"
