"""Directional well-posedness diagnostics for constrained minimization and VIs."""
