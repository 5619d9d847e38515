"""cvdec: closed-form decoherence of continuous-variable quantum states in
Gaussian baths, validated against independent numerical oracles."""

from . import channels, numerics, nongaussian, phase_space, two_mode

__version__ = "0.1.0"

__all__ = ["channels", "numerics", "nongaussian", "phase_space", "two_mode"]
