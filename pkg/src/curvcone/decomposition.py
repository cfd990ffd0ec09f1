"""Self-dual / anti-self-dual splitting and block data of 4D operators.

The Hodge star on 2-forms of R^4 has eigenvalues +-1 with 3-dimensional
eigenspaces.  In a basis adapted to that splitting every curvature operator
takes the block form

    [ A   B  ]
    [ B^T C  ]

with A, C symmetric 3x3 and B general 3x3.  This module fixes one canonical
adapted basis, extracts blocks and their spectral data, and implements the
block-level #-products together with the identities tying them back to the
full 6x6 picture (sharp block identity, Weyl extraction, |traceless Ricci|
= 2 |B|).

Spectral data is computed by a cyclic 3x3 Jacobi eigensolver (closed-form
cubics behave badly near repeated eigenvalues) and a 3x3 SVD built on it,
with deterministic sign fixing so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .wedge import (
    frobenius,
    kulkarni_nomizu,
    scalar,
    sharp_coord,
    traceless_ricci,
)

_SQ2 = 1.0 / math.sqrt(2.0)

_HODGE_STAR = np.zeros((6, 6))
_HODGE_STAR[0, 5] = _HODGE_STAR[5, 0] = 1.0
_HODGE_STAR[1, 4] = _HODGE_STAR[4, 1] = -1.0
_HODGE_STAR[2, 3] = _HODGE_STAR[3, 2] = 1.0

_LEVI = np.zeros((3, 3, 3))
for _i, _j, _k, _s in (
    (0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0),
    (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0),
):
    _LEVI[_i, _j, _k] = _s


def hodge_star() -> np.ndarray:
    """Hodge star as a symmetric 6x6 involution on wedge coefficients."""
    return _HODGE_STAR.copy()


@dataclass(frozen=True, eq=False)
class SelfDualBasis:
    """Orthonormal bases of the +-1 eigenspaces of the Hodge star.

    Rows of ``plus``/``minus`` are wedge-coefficient vectors.  Both triples
    satisfy the cyclic bracket relations [phi_1, phi_2] = sqrt(2) phi_3 within
    their factor and all cross brackets vanish.
    """

    plus: np.ndarray   # (3, 6)
    minus: np.ndarray  # (3, 6)

    @property
    def matrix(self) -> np.ndarray:
        """Orthogonal 6x6 change of basis; columns are phi+_1..3, phi-_1..3."""
        return np.vstack([self.plus, self.minus]).T


# Built from w1 = e3^e1, w2 = e2^e3, w3 = e1^e2 (ordered so the bracket
# triple is cyclic with the +sqrt(2) sign) via phi+-_i = (w_i +- *w_i)/sqrt2.
_CANONICAL = SelfDualBasis(
    plus=np.array(
        [
            [0.0, -1.0, 0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ]
    ) * _SQ2,
    minus=np.array(
        [
            [0.0, -1.0, 0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, -1.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0, 0.0, -1.0],
        ]
    ) * _SQ2,
)


def canonical_selfdual_basis() -> SelfDualBasis:
    return _CANONICAL


# ---------------------------------------------------------------------------
# 3x3 symmetric eigensolver (cyclic Jacobi) and SVD built on it
# ---------------------------------------------------------------------------

def _fix_column_signs(v: list[list[float]]) -> None:
    # Largest-magnitude component of each column made positive (first index
    # wins ties); keeps eigenframes deterministic across runs.
    for j in range(3):
        k, best = 0, abs(v[0][j])
        for i in (1, 2):
            if abs(v[i][j]) > best:
                k, best = i, abs(v[i][j])
        if v[k][j] < 0.0:
            for i in range(3):
                v[i][j] = -v[i][j]


def jacobi_eigh3(m, vectors: bool = True):
    """Eigenvalues (ascending) and eigenvector columns of a symmetric 3x3.

    Cyclic Jacobi sweeps to machine precision; plain-float implementation,
    deterministic including eigenvector signs.
    """
    a = [
        [float(m[0][0]), 0.5 * (float(m[0][1]) + float(m[1][0])), 0.5 * (float(m[0][2]) + float(m[2][0]))],
        [0.0, float(m[1][1]), 0.5 * (float(m[1][2]) + float(m[2][1]))],
        [0.0, 0.0, float(m[2][2])],
    ]
    a[1][0], a[2][0], a[2][1] = a[0][1], a[0][2], a[1][2]
    v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] if vectors else None

    norm2 = sum(a[i][j] * a[i][j] for i in range(3) for j in range(3))
    tol2 = (1e-15 * 1e-15) * norm2
    for _ in range(40):
        off2 = a[0][1] ** 2 + a[0][2] ** 2 + a[1][2] ** 2
        if off2 <= tol2:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p][q]
            if apq == 0.0:
                continue
            theta = (a[q][q] - a[p][p]) / (2.0 * apq)
            t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
            if theta < 0.0:
                t = -t
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            r = 3 - p - q
            a[p][p] -= t * apq
            a[q][q] += t * apq
            a[p][q] = a[q][p] = 0.0
            arp, arq = a[r][p], a[r][q]
            a[r][p] = a[p][r] = c * arp - s * arq
            a[r][q] = a[q][r] = s * arp + c * arq
            if vectors:
                for i in range(3):
                    vip, viq = v[i][p], v[i][q]
                    v[i][p] = c * vip - s * viq
                    v[i][q] = s * vip + c * viq

    vals = [a[0][0], a[1][1], a[2][2]]
    order = sorted(range(3), key=vals.__getitem__)
    w = np.array([vals[k] for k in order])
    if not vectors:
        return w, None
    vv = [[v[i][k] for k in order] for i in range(3)]
    _fix_column_signs(vv)
    return w, np.array(vv)


def svd3(b):
    """Singular values (ascending) and frames of a general 3x3 matrix.

    Via the eigendecomposition of B^T B; left vectors are B v / |B v| where
    that is well conditioned, completed orthonormally otherwise, so that
    u_i^T B v_i = s_i >= 0 with deterministic signs throughout.
    """
    b = np.asarray(b, dtype=float)
    btb = b.T @ b
    lam, v = jacobi_eigh3(0.5 * (btb + btb.T))
    bnorm = frobenius(b)
    u = np.zeros((3, 3))
    s = np.zeros(3)
    pending = []
    for i in range(3):
        w = b @ v[:, i]
        n = float(np.linalg.norm(w))
        if n > 1e-13 * max(bnorm, 1e-300):
            u[:, i] = w / n
            s[i] = n
        else:
            pending.append(i)
    for i in pending:
        cand = None
        for e in np.eye(3):
            res = e.copy()
            for j in range(3):
                if j != i and np.any(u[:, j]):
                    res -= float(res @ u[:, j]) * u[:, j]
            n = float(np.linalg.norm(res))
            if n > 0.5:
                cand = res / n
                break
        if cand is None:  # pragma: no cover - defensive, cannot happen
            raise RuntimeError("orthonormal completion failed")
        k = int(np.argmax(np.abs(cand)))
        u[:, i] = cand if cand[k] >= 0 else -cand
    order = np.argsort(s, kind="stable")
    return s[order], u[:, order], v[:, order]


# ---------------------------------------------------------------------------
# block extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlockData:
    """Blocks and spectral data of an operator in the canonical SD basis.

    ``vecs_a``/``vecs_c`` hold eigenvector columns (coordinates in the
    phi+ / phi- triples), matched to ``eigs_a``/``eigs_c``; ``left_b`` /
    ``right_b`` are singular frames with left^T B right = diag(svals_b).
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    eigs_a: np.ndarray
    eigs_c: np.ndarray
    svals_b: np.ndarray
    vecs_a: np.ndarray
    vecs_c: np.ndarray
    left_b: np.ndarray
    right_b: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "A": [float(x) for x in self.a.ravel()],
            "B": [float(x) for x in self.b.ravel()],
            "C": [float(x) for x in self.c.ravel()],
            "eigsA": [float(x) for x in self.eigs_a],
            "eigsC": [float(x) for x in self.eigs_c],
            "svalsB": [float(x) for x in self.svals_b],
        }


def _blocks_of(m: np.ndarray):
    p = _CANONICAL.matrix
    blk = p.T @ np.asarray(m, dtype=float) @ p
    a = 0.5 * (blk[:3, :3] + blk[:3, :3].T)
    c = 0.5 * (blk[3:, 3:] + blk[3:, 3:].T)
    b = 0.5 * (blk[:3, 3:] + blk[3:, :3].T)
    return a, b, c


def decompose(m) -> BlockData:
    """Block decomposition with sorted spectra and spectral frames."""
    a, b, c = _blocks_of(m)
    eigs_a, vecs_a = jacobi_eigh3(a)
    eigs_c, vecs_c = jacobi_eigh3(c)
    svals, left, right = svd3(b)
    return BlockData(a, b, c, eigs_a, eigs_c, svals, vecs_a, vecs_c, left, right)


def block_spectra(m):
    """(eigs_a, eigs_c, svals_b), each ascending; cheaper than decompose."""
    a, b, c = _blocks_of(m)
    eigs_a, _ = jacobi_eigh3(a, vectors=False)
    eigs_c, _ = jacobi_eigh3(c, vectors=False)
    btb = b.T @ b
    lam, _ = jacobi_eigh3(0.5 * (btb + btb.T), vectors=False)
    return eigs_a, eigs_c, np.sqrt(np.maximum(lam, 0.0))


def reassemble(a, b, c) -> np.ndarray:
    """Wedge-basis operator with the given blocks in the canonical SD basis."""
    blk = np.block([
        [np.asarray(a, dtype=float), np.asarray(b, dtype=float)],
        [np.asarray(b, dtype=float).T, np.asarray(c, dtype=float)],
    ])
    p = _CANONICAL.matrix
    m = p @ blk @ p.T
    return 0.5 * (m + m.T)


# ---------------------------------------------------------------------------
# block #-products and identities
# ---------------------------------------------------------------------------

def block_sharp3(s) -> np.ndarray:
    """3D #-product of a symmetric 3x3 matrix, by the cofactor-type display.

    For rows (a,b,c; b,e,f; c,f,k) the result is
    (ek-f^2, cf-bk, bf-ce; cf-bk, ak-c^2, bc-af; bf-ce, bc-af, ae-b^2).
    """
    a, b, c = float(s[0][0]), float(s[0][1]), float(s[0][2])
    e, f = float(s[1][1]), float(s[1][2])
    k = float(s[2][2])
    return np.array(
        [
            [e * k - f * f, c * f - b * k, b * f - c * e],
            [c * f - b * k, a * k - c * c, b * c - a * f],
            [b * f - c * e, b * c - a * f, a * e - b * b],
        ]
    )


def mixed_sharp3(b) -> np.ndarray:
    """#-square of the mixed block via structure constants of the SD triples.

    (B#)_ab = eps_agh eps_bdt B_gd B_ht / 2, where eps is exactly the
    bracket coefficient array of either eigenspace triple divided by
    sqrt(2).  Applies to non-symmetric input; reduces to
    :func:`block_sharp3` on symmetric input.
    """
    b = np.asarray(b, dtype=float)
    return 0.5 * np.einsum("agh,bdt,gd,ht->ab", _LEVI, _LEVI, b, b)


def block_sharp_identity(m) -> float:
    """Residual of R#R = 2 * (A#, B#; (B#)^T, C#) in the SD basis.

    The left side comes from the 4-index coordinate route, the right side
    from the 3x3 block products; contract <= 1e-10 * |R|^2 for Bianchi input.
    """
    bd = decompose(m)
    p = _CANONICAL.matrix
    lhs = p.T @ sharp_coord(m) @ p
    bsharp = mixed_sharp3(bd.b)
    rhs = 2.0 * np.block(
        [
            [block_sharp3(bd.a), bsharp],
            [bsharp.T, block_sharp3(bd.c)],
        ]
    )
    return frobenius(lhs - rhs)


def weyl(m) -> np.ndarray:
    """Weyl part: R minus its scalar and traceless-Ricci pieces.

    Commutes with the Hodge star and has trace-free diagonal blocks with a
    vanishing mixed block.
    """
    m = np.asarray(m, dtype=float)
    sc = scalar(m)
    return m - (sc / 12.0) * np.eye(6) - 0.5 * kulkarni_nomizu(traceless_ricci(m), np.eye(4))


def norm_identity_check(m) -> float:
    """| |traceless Ricci| - 2 |B| |; <= 1e-10 * |R| for Bianchi input."""
    _, b, _ = _blocks_of(np.asarray(m, dtype=float))
    return abs(frobenius(traceless_ricci(m)) - 2.0 * frobenius(b))
