"""
Services for seqfusion

Calibration, the sensor and fusion-center protocols, the Monte Carlo
harness, and experiment configuration and reporting.
"""
