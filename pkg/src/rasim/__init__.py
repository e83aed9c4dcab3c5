"""
rasim: link-level simulator for channel estimation with rotatable antennas.

Submodules
----------
numerics    complex linear algebra (Hermitian eig, least squares, products)
channel     geometry, gain pattern, steering vectors, channel synthesis
sigmodel    pilots, snapshot synthesis with AWGN, sample covariance
estimation  orientation-aware MUSIC and stacked LS path gains
optimizer   projected gradient ascent over the boresight cap
harness     training protocol, benchmark schemes, Monte-Carlo sweeps
cli         command-line entry point
"""

from . import channel, estimation, harness, numerics, optimizer, sigmodel

__all__ = ["channel", "estimation", "harness", "numerics", "optimizer", "sigmodel"]
__version__ = "0.1.0"
