"""
seqfusion - sequential detection across sensor networks

Calibrated tests that stop as soon as the pooled evidence of K sensors is
conclusive, with event-triggered one-bit communication to a fusion center.
"""

try:
    from ._version import __version__
except ImportError:
    # Fallback version for development environments without installed package
    __version__ = "0.0.0+dev"
