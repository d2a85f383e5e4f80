"""
ffcorr: numerical checks of correlation length versus spectral gap
in frustration-free spin Hamiltonians.
"""
__version__ = "1.0.0"
