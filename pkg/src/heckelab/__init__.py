"""heckelab: exact spherical Hecke-algebra computations for PGL(n, Q_p).

Modules:

* ``padic_hecke`` — cocharacters, coset enumeration, degrees, convolution;
* ``satake`` — Satake transform, parameter extraction, temperedness;
* ``measures`` — Plancherel / Sato-Tate densities, quadrature, sampling;
* ``weyl_law`` — eigenvalue-count main terms and remainder bookkeeping;
* ``family_sim`` — synthetic spectral families and equidistribution runs;
* ``lowlying`` — one-level density functionals for low-lying zeros;
* ``cli`` — command-line front end (`heckelab`).
"""

__version__ = "0.1.0"

from .kernel import backend_name  # noqa: F401
