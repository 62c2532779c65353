"""Reconstruction quality measures and rigid alignment."""

from dataclasses import asdict, dataclass

import numpy as np

from .linalg import as_realization


def mde(x, G):
    """Mean distance error ``(1/|E|) sum | ||x_i - x_j|| - d_ij |``.

    Errors are in distances, not squared distances.
    """
    a = as_realization(x)
    if a.shape[0] != G.n:
        raise ValueError("realization and graph disagree on n")
    if G.num_edges == 0:
        raise ValueError("MDE of a graph without edges is undefined")
    dist = np.linalg.norm(a[G.i] - a[G.j], axis=1)
    return float(np.mean(np.abs(dist - G.d)))


def adjacency_mean_error(G1, G2):
    """Mean absolute difference of the upper-triangular weighted adjacencies.

    Averages over all ``N = n(n-1)/2`` positions; a missing edge has weight 0.
    Vertices are compared under identity labeling.
    """
    if G1.n != G2.n:
        raise ValueError(f"graphs have different vertex counts ({G1.n} vs {G2.n})")
    iu = np.triu_indices(G1.n, k=1)
    diff = G1.adjacency()[iu] - G2.adjacency()[iu]
    return float(np.mean(np.abs(diff))) if diff.size else 0.0


def rmsd(x, y):
    a, b = as_realization(x), as_realization(y)
    return float(np.sqrt(np.mean(np.sum((a - b) ** 2, axis=1))))


@dataclass(frozen=True)
class Alignment:
    x: np.ndarray
    rotation: np.ndarray
    translation: np.ndarray
    rmsd: float


def procrustes_align(x, ref, reflections=True):
    """Rigid motion of ``x`` minimizing the Frobenius distance to ``ref``.

    The orthogonal part comes from the SVD of the cross-covariance (Kabsch).
    With ``reflections=False`` only proper rotations are used.
    """
    a, b = as_realization(x), as_realization(ref)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    cb = b.mean(axis=0)
    if np.allclose(b, cb, rtol=0.0, atol=1e-12 * max(1.0, np.abs(b).max())):
        raise ValueError("reference points all coincide")
    ca = a.mean(axis=0)
    H = (a - ca).T @ (b - cb)
    U, _, Vt = np.linalg.svd(H)
    if not reflections and np.linalg.det(U @ Vt) < 0:
        U[:, -1] *= -1
    R = U @ Vt
    t = cb - ca @ R
    out = a @ R + t
    return Alignment(out, R, t, rmsd(out, b))


@dataclass
class EvaluationReport:
    """Flat record of one reconstruction, printable as ``key=value`` lines."""

    mde: float = float("nan")
    quartic: float = float("nan")
    adjacency_mean_error: float = None
    rmsd: float = None
    density: float = None
    time_milp: float = None
    time_dgp: float = None
    time_total: float = None

    def to_text(self):
        lines = []
        for k, v in asdict(self).items():
            if v is None:
                continue
            lines.append(f"{k}={v:.17g}" if isinstance(v, float) else f"{k}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        vals = {}
        for ln in text.splitlines():
            if "=" in ln:
                k, v = ln.split("=", 1)
                if k in cls.__dataclass_fields__:
                    vals[k] = float(v)
        return cls(**vals)
