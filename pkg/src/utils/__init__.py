"""
Utilities for seqfusion

Exceptions, the diagnostic console and logging setup.
"""
