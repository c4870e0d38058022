"""
relcoulomb - classical phase-space densities of the relativistic hydrogen atom
"""

__version__ = "0.1.0"
