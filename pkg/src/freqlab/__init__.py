"""Frequency-domain training diagnostics and hybrid solvers for 1-d Poisson.

Subpackages:

- nn: dense network with exact backprop and seeded Gaussian init
- losses: square error, two-term cross entropy, discrete Dirichlet energy
- spectral: direct DFT/NUFFT, peak tracking, per-mode gradient decomposition
- poisson: tridiagonal assembly, direct/Jacobi/Gauss-Seidel solvers, hybrids
- data: MNIST IDX parsing and leading-direction PCA reduction
- config / experiments / reporting / cli: reproducible experiment runs
"""

from . import config, data, errors, experiments, losses, nn, poisson, reporting, spectral

__version__ = "0.1.0"
