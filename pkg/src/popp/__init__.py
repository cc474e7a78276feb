"""Popp's volume and the canonical sub-Laplacian for polynomial sub-Riemannian structures."""
