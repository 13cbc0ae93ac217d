"""Coherent-misfit coarsening of binary alloys: microelasticity kernels, sharp-interface
closed forms, elastic Cahn-Hilliard dynamics, Kawasaki Monte Carlo and morphology metrics."""

__version__ = "0.1.0"
