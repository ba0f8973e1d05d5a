"""
Data models for seqfusion

Observation models, thresholds, sensor and fusion-center state, and
experiment configuration and results.
"""
