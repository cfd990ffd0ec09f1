"""Algebra of 2-forms on R^4 and curvature operators in the wedge basis.

Conventions, fixed once and used by every other module:

* Ordered orthonormal basis of the 2-forms::

      b0 = e1^e2,  b1 = e1^e3,  b2 = e1^e4,
      b3 = e2^e3,  b4 = e2^e4,  b5 = e3^e4

  orthonormal for the inner product <u, v> = -tr(uv)/2 under the
  identification ei^ej -> E_ij - E_ji with skew matrices.
* A curvature operator is a symmetric 6x6 matrix M in this basis,
  M[a, b] = R(b_a, b_b).  The diagonal entry for ei^ej is the sectional
  curvature of the (i, j) coordinate plane; np.eye(6) is the operator of
  constant sectional curvature 1.
* First Bianchi identity: R_1234 - R_1324 + R_1423 = 0, which reads
  M[0, 5] - M[1, 4] + M[2, 3] = 0 here.

Eigenvalue normalizations downstream (block eigenvalues A_i, C_i, B_i)
inherit this inner product; treatments that normalize <u, v> = -tr(uv)
instead carry an extra factor of 2 in those quantities.

All functions are pure and never mutate their inputs.
"""

from __future__ import annotations

import warnings

import numpy as np

#: Index pairs (i, j), i < j, of the ordered wedge basis (0-based).
WEDGE_PAIRS: tuple[tuple[int, int], ...] = (
    (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
)
PAIR_INDEX: dict[tuple[int, int], int] = {p: a for a, p in enumerate(WEDGE_PAIRS)}

_ROW = np.array([p[0] for p in WEDGE_PAIRS])
_COL = np.array([p[1] for p in WEDGE_PAIRS])
_UPPER = np.triu_indices(6)

# Direction spanning the Bianchi-violating line inside symmetric matrices:
# <M, _BIANCHI_DIR>_F = 2 * (M[0,5] - M[1,4] + M[2,3]).
_BIANCHI_DIR = np.zeros((6, 6))
_BIANCHI_DIR[0, 5] = _BIANCHI_DIR[5, 0] = 1.0
_BIANCHI_DIR[1, 4] = _BIANCHI_DIR[4, 1] = -1.0
_BIANCHI_DIR[2, 3] = _BIANCHI_DIR[3, 2] = 1.0

_STRUCT: np.ndarray | None = None
_BIVECTORS: np.ndarray | None = None


def frobenius(m) -> float:
    """Frobenius norm, the operator norm used by every tolerance here."""
    return float(np.linalg.norm(np.asarray(m, dtype=float)))


def identity_operator() -> np.ndarray:
    """The curvature operator of constant sectional curvature 1."""
    return np.eye(6)


def basis_two_form(i: int, j: int) -> np.ndarray:
    """Coefficient vector of ei^ej (0-based indices, i != j)."""
    if i == j:
        raise ValueError("ei^ei = 0 is not a basis form")
    u = np.zeros(6)
    if i < j:
        u[PAIR_INDEX[(i, j)]] = 1.0
    else:
        u[PAIR_INDEX[(j, i)]] = -1.0
    return u


def skew_matrix(u) -> np.ndarray:
    """4x4 skew matrix of a 2-form under ei^ej -> E_ij - E_ji."""
    u = np.asarray(u, dtype=float)
    m = np.zeros((4, 4))
    m[_ROW, _COL] = u
    m[_COL, _ROW] = -u
    return m


def two_form_of_skew(m) -> np.ndarray:
    """Inverse of :func:`skew_matrix`."""
    return np.asarray(m, dtype=float)[_ROW, _COL].copy()


def form_inner(u, v) -> float:
    """<u, v> = -tr(UV)/2 computed through the skew-matrix picture."""
    return float(-0.5 * np.trace(skew_matrix(u) @ skew_matrix(v)))


def wedge_coefficients(v, w) -> np.ndarray:
    """Coefficient vector of v^w for v, w in R^4; batched over leading axes."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    return v[..., _ROW] * w[..., _COL] - v[..., _COL] * w[..., _ROW]


def lie_bracket(u, v) -> np.ndarray:
    """Lie bracket [u, v] on 2-forms, via the skew-matrix commutator.

    Independent of :func:`structure_constants`, which is built from the
    Kronecker-delta closed formula; the two routes are cross-checked in
    the test suite.
    """
    a = skew_matrix(u)
    b = skew_matrix(v)
    return two_form_of_skew(a @ b - b @ a)


def _eye2(i: int, j: int, p: int, q: int) -> int:
    # I^{ij}_{pq} = d_ip d_jq - d_iq d_jp
    return (1 if (i == p and j == q) else 0) - (1 if (i == q and j == p) else 0)


def structure_constants() -> np.ndarray:
    """C[a, g, h] with [b_g, b_h] = sum_a C[a, g, h] b_a.

    Built from the closed formula
    C^{(ij)(kl)}_{(pq)} = d_jk I^{il}_{pq} - d_jl I^{ik}_{pq}
                          - d_ik I^{jl}_{pq} + d_il I^{jk}_{pq}.
    Antisymmetric in (g, h); fully antisymmetric as a 3-tensor because the
    basis is orthonormal and the inner product is ad-invariant.
    """
    global _STRUCT
    if _STRUCT is None:
        c = np.zeros((6, 6, 6))
        for g, (i, j) in enumerate(WEDGE_PAIRS):
            for h, (k, l) in enumerate(WEDGE_PAIRS):
                for a, (p, q) in enumerate(WEDGE_PAIRS):
                    c[a, g, h] = (
                        (j == k) * _eye2(i, l, p, q)
                        - (j == l) * _eye2(i, k, p, q)
                        - (i == k) * _eye2(j, l, p, q)
                        + (i == l) * _eye2(j, k, p, q)
                    )
        _STRUCT = c
    return _STRUCT


def _sharp_raw(m: np.ndarray, n: np.ndarray, c: np.ndarray) -> np.ndarray:
    t = np.einsum("bdt,gd->bgt", c, m)
    t = np.einsum("bgt,ht->bgh", t, n)
    return 0.5 * np.einsum("agh,bgh->ab", c, t)


def sharp(m, n) -> np.ndarray:
    """Hamilton #-product (M#N)_ab = C_a^{gh} C_b^{dt} M_gd N_ht / 2.

    Defined for all symmetric bilinear forms on the 2-forms; the first
    Bianchi identity is not required.  Commutative in (M, N) bit-for-bit
    by construction.
    """
    c = structure_constants()
    ma = np.asarray(m, dtype=float)
    na = np.asarray(n, dtype=float)
    if ma is na or np.array_equal(ma, na):
        out = _sharp_raw(ma, ma, c)
    else:
        out = 0.5 * (_sharp_raw(ma, na, c) + _sharp_raw(na, ma, c))
    return 0.5 * (out + out.T)


def _bivector_matrices() -> np.ndarray:
    global _BIVECTORS
    if _BIVECTORS is None:
        f = np.zeros((6, 4, 4))
        for a, (i, j) in enumerate(WEDGE_PAIRS):
            f[a, i, j] = 1.0
            f[a, j, i] = -1.0
        _BIVECTORS = f
    return _BIVECTORS


def four_index(m) -> np.ndarray:
    """(4,4,4,4) component tensor R_ijkl of a 6x6 wedge-basis operator."""
    f = _bivector_matrices()
    return np.einsum("ab,aij,bkl->ijkl", np.asarray(m, dtype=float), f, f)


def from_four_index(t) -> np.ndarray:
    """6x6 wedge-basis matrix from a (4,4,4,4) component tensor."""
    t = np.asarray(t, dtype=float)
    return t[_ROW[:, None], _COL[:, None], _ROW[None, :], _COL[None, :]].copy()


def sharp_coord(m) -> np.ndarray:
    """R#R through the 4-index contraction R_ipkw R_jplw - R_jpkw R_iplw.

    Deliberately independent of :func:`sharp`; acceptance checks require the
    two routes to agree to 1e-12 relative.
    """
    t = four_index(m)
    s = np.einsum("ipkw,jplw->ijkl", t, t)
    s = s - s.transpose(1, 0, 2, 3)
    out = from_four_index(s)
    return 0.5 * (out + out.T)


def q_operator(m) -> np.ndarray:
    """Reaction term Q(R) = R^2 + R#R of the curvature evolution equation."""
    m = np.asarray(m, dtype=float)
    sq = m @ m
    return 0.5 * (sq + sq.T) + sharp(m, m)


def kulkarni_nomizu(h, k) -> np.ndarray:
    """Kulkarni-Nomizu product of two symmetric 2-tensors, as an operator.

    (h^k)_ijkl = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il; the output
    always satisfies the first Bianchi identity, and kulkarni_nomizu(id, id)
    equals twice the identity operator.
    """
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    t = (
        np.einsum("ik,jl->ijkl", h, k)
        + np.einsum("jl,ik->ijkl", h, k)
        - np.einsum("il,jk->ijkl", h, k)
        - np.einsum("jk,il->ijkl", h, k)
    )
    out = from_four_index(t)
    return 0.5 * (out + out.T)


def bianchi_residual(m) -> float:
    """|R_1234 - R_1324 + R_1423|; zero iff M is a curvature operator."""
    m = np.asarray(m, dtype=float)
    return abs(float(m[0, 5] - m[1, 4] + m[2, 3]))


def project_bianchi(m) -> np.ndarray:
    """Orthogonal projection onto the Bianchi hyperplane.

    Subtracts the component along the one violating direction; symmetric
    input is returned otherwise unchanged.  Constructors accept raw data,
    so this step is explicit rather than silent.
    """
    m = np.asarray(m, dtype=float)
    coef = float(np.sum(m * _BIANCHI_DIR)) / 6.0
    return m - coef * _BIANCHI_DIR


def ricci(m, warn: bool = True) -> np.ndarray:
    """Ricci contraction Ric_jl = sum_i R_ijil of a wedge-basis operator.

    The contraction convention is tied to R_ijij = sectional curvature;
    on a non-Bianchi input the result is convention-dependent, hence the
    warning.
    """
    m = np.asarray(m, dtype=float)
    if warn and bianchi_residual(m) > 1e-8 * max(1.0, frobenius(m)):
        warnings.warn(
            "operator violates the first Bianchi identity; "
            "Ricci contraction is convention-dependent",
            stacklevel=2,
        )
    t = four_index(m)
    r = np.einsum("ijil->jl", t)
    return 0.5 * (r + r.T)


def scalar(m, warn: bool = True) -> float:
    """Scalar curvature tr Ric; equals 12 on the identity operator."""
    return float(np.trace(ricci(m, warn=warn)))


def traceless_ricci(m, warn: bool = True) -> np.ndarray:
    r = ricci(m, warn=warn)
    return r - (float(np.trace(r)) / 4.0) * np.eye(4)


def barrier_q_expansion(m, big_phi: float, small_phi: float) -> float:
    """Residual of Q(F*R + f*I) = F^2 Q(R) + f*F Ric^id + 3 f^2 I.

    Returns the Frobenius norm of the difference; for Bianchi input this is
    pure rounding noise, bounded by 1e-10 * (1 + |R|^2 + f^2).
    """
    m = np.asarray(m, dtype=float)
    lam = big_phi * m + small_phi * np.eye(6)
    rhs = (
        big_phi**2 * q_operator(m)
        + small_phi * big_phi * kulkarni_nomizu(ricci(m), np.eye(4))
        + 3.0 * small_phi**2 * np.eye(6)
    )
    return frobenius(q_operator(lam) - rhs)


def induced_wedge_rotation(q) -> np.ndarray:
    """6x6 action on 2-forms induced by a rotation q of R^4."""
    q = np.asarray(q, dtype=float)
    return (
        q[_ROW[:, None], _ROW[None, :]] * q[_COL[:, None], _COL[None, :]]
        - q[_ROW[:, None], _COL[None, :]] * q[_COL[:, None], _ROW[None, :]]
    )


def rotate_operator(m, q) -> np.ndarray:
    """Pull back an operator by a rotation q of R^4."""
    w = induced_wedge_rotation(q)
    out = w.T @ np.asarray(m, dtype=float) @ w
    return 0.5 * (out + out.T)


# ---------------------------------------------------------------------------
# serialization: {"basis": "wedge4", "upper": [21 numbers]}
# ---------------------------------------------------------------------------

def upper_triangle(m) -> np.ndarray:
    """The 21 upper-triangle entries, row-major: (0,0),(0,1),...,(5,5)."""
    return np.asarray(m, dtype=float)[_UPPER].copy()


def operator_from_upper(vals) -> np.ndarray:
    vals = np.asarray(vals, dtype=float)
    if vals.shape != (21,):
        raise ValueError(f"expected 21 upper-triangle entries, got {vals.size}")
    m = np.zeros((6, 6))
    m[_UPPER] = vals
    return m + m.T - np.diag(np.diag(m))


def operator_to_json_dict(m) -> dict:
    return {"basis": "wedge4", "upper": [float(x) for x in upper_triangle(m)]}


def operator_from_json_dict(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValueError("operator record must be a JSON object")
    if obj.get("basis") != "wedge4":
        raise ValueError('operator record must carry "basis": "wedge4"')
    upper = obj.get("upper")
    if not isinstance(upper, (list, tuple)) or len(upper) != 21:
        n = len(upper) if isinstance(upper, (list, tuple)) else "no"
        raise ValueError(f'"upper" must hold exactly 21 numbers, got {n}')
    try:
        return operator_from_upper([float(x) for x in upper])
    except (TypeError, ValueError) as exc:
        raise ValueError(f'"upper" must hold exactly 21 numbers: {exc}') from exc
