"""Axisymmetric FDTD and analytic mode tools for nanowire-plasmon to
nanofiber-photon butt-coupling studies."""

__version__ = "0.1.0"
