"""Per-point summaries combining the flag, volume and sub-Laplacian results."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .flag import DEFAULT_TOL, AdaptedFrame, SRStructure, adapted_frame, hausdorff_dimension
from .sublap import DEFAULT_FD_STEP, AccuracyWarning, sublaplacian_coeffs
from .volume import (
    adapted_constants,
    gram_matrices,
    oracle_gram,
    popp_density_adapted,
    popp_density_coordinates,
)


@dataclass
class PoppReport:
    point: list[float]
    growth_vector: list[int]
    flag_dims: list[int]
    hausdorff_dimension: int
    frame_words: list[str]
    det_B: list[float]
    popp_density_adapted: float
    popp_density_coordinates: float
    sublaplacian_coefficients: list[float] | None = None
    oracle_max_deviation: float | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def oracle_deviation(frame: AdaptedFrame, q=None, B=None) -> float:
    """Largest entrywise gap between the oracle Gram matrices and B_j^-1.

    Each level's gap is relative to the largest entry of that B_j^-1.
    """
    q = frame.basepoint if q is None else q
    if B is None:
        B = gram_matrices(adapted_constants(frame, q)).matrices
    worst = 0.0
    for j in range(2, frame.step + 1):
        ref = np.linalg.inv(B[j - 1])
        G = oracle_gram(frame, q, j)
        worst = max(worst, float(np.max(np.abs(G - ref)) / np.max(np.abs(ref))))
    return worst


def analyze_point(s: SRStructure, q, tol: float = DEFAULT_TOL, completion=None,
                  fd_step: float = DEFAULT_FD_STEP, sublaplacian: bool = True,
                  oracle: bool = False) -> PoppReport:
    """Everything this package computes at one point."""
    frame = adapted_frame(s, q, tol, completion=completion)
    g = gram_matrices(adapted_constants(frame))
    notes = []
    coeffs = None
    if sublaplacian:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AccuracyWarning)
            sl = sublaplacian_coeffs(frame, h=fd_step)
        coeffs = [float(a) for a in sl.coefficients]
        notes.extend(sl.warnings)
    dens_a = float(popp_density_adapted(g))
    dens_c = float(popp_density_coordinates(frame, g))
    cond = float(np.linalg.cond(frame.matrix(frame.basepoint)))
    if cond > 1e8:
        notes.append(f"frame matrix condition number {cond:.3g}")
    dev = oracle_deviation(frame, B=g.matrices) if oracle else None
    if dev is not None and dev > 1e-9:
        notes.append(f"oracle deviation {dev:.3g} exceeds 1e-9")
    for v in (dens_a, dens_c):
        if not math.isfinite(v) or v <= 0:
            notes.append("non-finite or non-positive density")
    return PoppReport(
        point=list(frame.basepoint),
        growth_vector=list(frame.flag_dims),
        flag_dims=list(frame.flag_dims),
        hausdorff_dimension=hausdorff_dimension(frame.flag_dims),
        frame_words=frame.word_labels(),
        det_B=[float(d) for d in g.dets],
        popp_density_adapted=dens_a,
        popp_density_coordinates=dens_c,
        sublaplacian_coefficients=coeffs,
        oracle_max_deviation=dev,
        warnings=notes,
    )
