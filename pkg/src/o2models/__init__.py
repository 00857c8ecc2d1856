"""Algebraic models for rational O(2)-spectra.

Submodules: ``burnside`` (rational Burnside ring), ``euler_of`` (modules over
the ring of operations), ``model_t`` (the torus-normalizer model and its
relatives), ``model_c`` (W-equivariant objects), ``model_d`` (dihedral
sheaves), ``adams`` (Adams sequences), ``formats`` and ``cli``.
"""

__version__ = "0.1.0"
