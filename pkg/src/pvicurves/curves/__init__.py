"""Curve analysis: genus, degree, Belyi certificates, models and singularities."""
