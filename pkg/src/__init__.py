"""
underfit
Nonnegative matrix underapproximation and robust multi-model fitting
"""
