"""Core package (numpy only).

Typed models, the numeric kernels for the network and the losses, and the
config validators. Testable without any I/O.
"""
