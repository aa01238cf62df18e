"""Grunsky coefficients and the spectral structure of the operators B and K.

The table a_{kl} collects the double expansion

    log((phi(zeta) - phi(z)) / (zeta - z)) = - sum a_{kl} zeta**(-k) z**(-l)

for |z|, |zeta| > 1.  The primary algorithm is branch free: it builds the
Faber polynomials of the curve through the triangular system expressing
z**k in powers of phi, expands

    Phi_k(phi(z)) = z**k + k * sum_l a_{kl} z**(-l),

and reads the coefficients off the negative powers.  A 2-D FFT of samples
of the logarithm on a torus |zeta| = |z| = radius is kept as an
independent cross-check.

B is the matrix sqrt(k*l) a_{kl}; K is the real symmetric doubling

    K = [[B1, B2], [B2, -B1]],   B = B1 + i B2,

whose eigenvalues are +/- the singular values of B.  The Takagi
factorization B = U Lambda U^t is recovered from the K eigenproblem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AliasingDetected,
    BranchJumpDetected,
    DilationNotGreaterThanOne,
    NotSymmetric,
    PairingFailed,
    SingularValueAtOne,
    TruncationTooSmall,
)
from .series import ExteriorMap, LaurentSeries, _laurent_axpy, _phi_norm, laurent_mul

_DELTA_EPS = 0.1  # fixed exponent offset in the tail diagnostic

M_AUTO_CAP = 512
M_AUTO_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GrunskyTable:
    """Symmetrized m-by-m table of Grunsky coefficients.

    ``asym_defect`` records the relative asymmetry max|a - a^t| / max|a|
    seen before symmetrization.
    """

    m: int
    a: np.ndarray
    source_map_id: str
    asym_defect: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        if a.shape != (self.m, self.m):
            raise ValueError("table must be m x m")
        object.__setattr__(self, "a", _readonly(a))


@dataclass(frozen=True)
class OperatorPair:
    """B = sqrt(k l) a_{kl} and its real symmetric doubling K (2m x 2m)."""

    B: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "B", _readonly(np.asarray(self.B, dtype=complex)))
        object.__setattr__(self, "K", _readonly(np.asarray(self.K, dtype=float)))

    @property
    def m(self) -> int:
        return self.B.shape[0]


@dataclass(frozen=True)
class TakagiFactor:
    """Unitary U and nonincreasing singular values with B = U diag(lam) U^t."""

    U: np.ndarray
    lam: np.ndarray
    residual: float

    def __post_init__(self):
        object.__setattr__(self, "U", _readonly(np.asarray(self.U, dtype=complex)))
        object.__setattr__(self, "lam", _readonly(np.asarray(self.lam, dtype=float)))


@dataclass(frozen=True)
class SpectralReport:
    log_det_IplusK: float
    log_det_IminusBstarB: float
    szego_energy: float
    hs_norm_sq: float
    delta_m_tail: float
    kappa_hat: float


def _symmetrize(a: np.ndarray) -> tuple[np.ndarray, float]:
    defect = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    scale = max(float(np.max(np.abs(a))) if a.size else 0.0, np.finfo(float).tiny)
    return 0.5 * (a + a.T), defect / scale


def _work_order(mp: ExteriorMap, size: int, work_order: int | None) -> int:
    needed = 3 * size
    if work_order is None:
        return max(needed, mp.trunc_order)
    if work_order < needed:
        raise TruncationTooSmall(
            f"work truncation {work_order} cannot resolve z**-{size}; need >= {needed}"
        )
    return work_order


def grunsky_coefficients(mp: ExteriorMap, size: int, work_order: int | None = None) -> GrunskyTable:
    """Table a_{kl}, 1 <= k,l <= size, by the Faber route.

    The composed Faber polynomials u_k(z) = Phi_k(phi(z)) = z**k
    + k sum_l a_{kl} z**(-l) are generated by the exact recurrence

        u_{n+1} = (phi - phi0) u_n - sum_{j<n} phi_{-j} u_{n-j} - (n+1) phi_{-n},

    which is the triangular system expressing z**k in powers of phi in
    recurrence form.  Eliminating against explicitly expanded powers
    phi**j is mathematically identical but subtracts exponentially large
    multiples, so it loses digits beyond size ~ 64 on generic curves
    (see _faber_elimination_table); the recurrence keeps every
    intermediate the size of the answer.  The known structure of u_k
    (monic top coefficient, no other nonnegative powers) is reimposed
    after each step.

    The working Laurent truncation defaults to 3*size; anything smaller
    cannot resolve z**(-size) reliably and is rejected.
    """
    if size < 1:
        raise ValueError("table size must be >= 1")
    W = _work_order(mp, size, work_order)
    tail = np.zeros(W, dtype=complex)
    tail[: mp.trunc_order] = mp.tail
    phi_c = np.zeros(W + 2, dtype=complex)  # phi - phi0, lead degree 1
    phi_c[0] = 1.0
    phi_c[2:] = tail
    phi_m0 = LaurentSeries(1, phi_c, W)
    a = np.zeros((size, size), dtype=complex)
    u_list = [phi_m0]
    for n in range(1, size + 1):
        u_n = u_list[n - 1]
        for el in range(1, size + 1):
            a[n - 1, el - 1] = u_n.coeff(-el) / n
        if n == size:
            break
        nxt = laurent_mul(phi_m0, u_n)
        for j in range(1, n):
            tj = tail[j - 1]
            if tj != 0.0:
                nxt = _laurent_axpy(nxt, tj, u_list[n - j - 1])
        coeffs = np.array(nxt.coeffs)
        # zeroing z**0 performs the -(n+1) phi_{-n} subtraction, since that
        # is exactly the constant the product leaves behind; z**n .. z**1
        # vanish identically and only hold rounding junk
        coeffs[: n + 2] = 0.0
        coeffs[0] = 1.0
        u_list.append(LaurentSeries(n + 1, coeffs, W))
    sym, defect = _symmetrize(a)
    return GrunskyTable(size, sym, mp.label(), defect)


def _faber_elimination_table(mp: ExteriorMap, size: int) -> np.ndarray:
    """Unit-triangular elimination against expanded powers of phi.

    Kept as an independent small-size cross-check of the recurrence; the
    Faber coefficients it subtracts grow exponentially with the degree,
    so this variant is unreliable past size ~ 64 on generic curves.
    """
    W = 3 * size
    phi = mp.as_series(W)
    one = LaurentSeries(0, np.r_[1.0 + 0j, np.zeros(W, dtype=complex)], W)
    powers = [one]
    for _ in range(size):
        powers.append(laurent_mul(powers[-1], phi))
    a = np.zeros((size, size), dtype=complex)
    for k in range(1, size + 1):
        s = powers[k]
        for j in range(k - 1, -1, -1):
            c = s.coeff(j)
            if c != 0.0:
                s = _laurent_axpy(s, c, powers[j])
        for el in range(1, size + 1):
            a[k - 1, el - 1] = s.coeff(-el) / k
    return a


def grunsky_coefficients_sampled(
    mp: ExteriorMap, size: int, radius: float, grid: int | None = None
) -> GrunskyTable:
    """Cross-check table from a 2-D DFT of the sampled logarithm.

    Samples log((phi(z1) - phi(z2)) / (z1 - z2)) on z_i = radius * e^{i a},
    with phi'(z) on the diagonal, and rescales the (k, l) DFT coefficient
    by radius**(k+l).  Raises if the principal branch jumps between grid
    neighbours or if the DFT tail band is above 1e-8 of the peak.
    """
    if radius <= 1.0:
        raise ValueError("radius must be > 1")
    if grid is None:
        grid = 1 << int(np.ceil(np.log2(max(8 * size, 64))))
    if grid < 2 * (size + 1):
        raise ValueError("grid too small to hold the requested table")
    alpha = 2.0 * np.pi * np.arange(grid) / grid
    z = radius * np.exp(1j * alpha)
    phi = _phi_norm(mp, z, 0)
    num = phi[:, None] - phi[None, :]
    den = z[:, None] - z[None, :]
    np.fill_diagonal(num, 1.0)
    np.fill_diagonal(den, 1.0)
    F = np.log(num / den)
    np.fill_diagonal(F, np.log(_phi_norm(mp, z, 1)))
    jumps = max(
        float(np.max(np.abs(np.diff(F.imag, axis=0, append=F.imag[:1, :])))),
        float(np.max(np.abs(np.diff(F.imag, axis=1, append=F.imag[:, :1])))),
    )
    if jumps > np.pi:
        raise BranchJumpDetected(
            f"imaginary part of the log jumps by {jumps:.3f} > pi on the sampling torus"
        )
    C = np.fft.fft2(F) / grid**2
    peak = float(np.max(np.abs(C)))
    half = grid // 2
    band = max(
        float(np.max(np.abs(C[half - 1:half + 1, :]))),
        float(np.max(np.abs(C[:, half - 1:half + 1]))),
    )
    # an identically small transform (circle-like data) has no tail to alias
    floor = 64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(F))))
    if band > max(1e-8 * peak, floor):
        raise AliasingDetected(
            f"tail band {band:.3e} exceeds 1e-8 of peak {peak:.3e}; refine the grid"
        )
    k = np.arange(1, size + 1)
    a = -C[np.ix_((-k) % grid, (-k) % grid)] * radius ** (k[:, None] + k[None, :]).astype(float)
    sym, defect = _symmetrize(a)
    return GrunskyTable(size, sym, mp.label(), defect)


def operators(table: GrunskyTable) -> OperatorPair:
    """Assemble B = sqrt(k l) a_{kl} and K = [[B1, B2], [B2, -B1]]."""
    k = np.sqrt(np.arange(1, table.m + 1, dtype=float))
    B = table.a * np.outer(k, k)
    return OperatorPair(B, _k_matrix(B))


def _k_matrix(B: np.ndarray) -> np.ndarray:
    B1, B2 = B.real, B.imag
    return np.block([[B1, B2], [B2, -B1]])


def takagi(B: np.ndarray) -> TakagiFactor:
    """Takagi factorization B = U diag(lam) U^t via the K eigenproblem.

    An eigenvector (r; s) of K for +lam yields the column u = r + i s;
    (s; -r) is then automatically an eigenvector for -lam, which is what
    makes the doubled matrix [[R, S], [S, -R]] orthogonal.  The kernel of
    K is invariant under J:(r;s)->(s;-r), and a basis {t_j, J t_j} is
    built greedily so the zero-space columns stay unitary as well.
    """
    B = np.asarray(B, dtype=complex)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("B must be square")
    msize = B.shape[0]
    if msize and float(np.max(np.abs(B - B.T))) > 1e-12:
        raise NotSymmetric("matrix is not complex symmetric to 1e-12")
    K = _k_matrix(B)
    w, V = np.linalg.eigh(K)
    scale = max(float(np.max(np.abs(w))) if len(w) else 0.0, 1.0)
    ztol = 1e-13 * scale
    ws = np.sort(w)
    pair_gap = float(np.max(np.abs(ws + ws[::-1]))) if len(w) else 0.0
    if pair_gap > 1e-9 * scale:
        raise PairingFailed(f"eigenvalues fail the +/- pairing by {pair_gap:.3e}")
    pos = np.nonzero(w > ztol)[0]
    neg = np.nonzero(w < -ztol)[0]
    zer = np.nonzero(np.abs(w) <= ztol)[0]
    if len(pos) != len(neg) or len(zer) % 2 != 0:
        raise PairingFailed(
            f"multiplicities disagree: {len(pos)} positive, {len(neg)} negative, "
            f"{len(zer)} near zero"
        )
    order = pos[np.argsort(-w[pos])]
    lam = list(w[order])
    cols = [V[:msize, i] + 1j * V[msize:, i] for i in order]
    if len(zer):
        basis = V[:, zer]
        want = len(zer) // 2
        for _ in range(want):
            t = basis[:, 0]
            t = t / np.linalg.norm(t)
            Jt = np.concatenate([t[msize:], -t[:msize]])
            cols.append(t[:msize] + 1j * t[msize:])
            lam.append(0.0)
            rest = basis[:, 1:]
            rest = rest - np.outer(t, t @ rest) - np.outer(Jt, Jt @ rest)
            if rest.shape[1]:
                u_, s_, _ = np.linalg.svd(rest, full_matrices=False)
                basis = u_[:, : rest.shape[1] - 1]
    U = np.column_stack(cols) if cols else np.zeros((0, 0), dtype=complex)
    lam = np.asarray(lam, dtype=float)
    recon = (U * lam) @ U.T
    residual = float(np.max(np.abs(B - recon))) if msize else 0.0
    return TakagiFactor(U, lam, residual)


def spectral_report(pair: OperatorPair, mp: ExteriorMap | None = None) -> SpectralReport:
    """Determinant, energy and truncation diagnostics for one table.

    log det(I+K) comes from the symmetric eigendecomposition of K and
    log det(I - B*B) from the Takagi singular values, so their agreement
    exercises the determinant identity det(I+K) = prod(1 - lam_j**2).
    The map argument is accepted only as provenance and is unused.
    """
    tak = takagi(pair.B)
    kappa = float(tak.lam[0]) if len(tak.lam) else 0.0
    if kappa >= 1.0 - 1e-10:
        raise SingularValueAtOne(
            f"largest singular value {kappa!r} reaches 1; determinant diverges"
        )
    wk = np.linalg.eigvalsh(pair.K)
    log_det_IplusK = float(np.sum(np.log1p(wk)))
    log_det_ImBB = float(np.sum(np.log1p(-tak.lam**2)))
    msize = pair.m
    delta = 0.0
    if msize:
        k = np.arange(1, msize + 1, dtype=float)
        kl = np.outer(k, k) ** (2.0 + _DELTA_EPS)
        edge = np.zeros((msize, msize), dtype=bool)
        edge[-1, :] = True
        edge[:, -1] = True
        delta = float(np.sqrt(np.sum(kl[edge] * np.abs(pair.B[edge]) ** 2)))
    return SpectralReport(
        log_det_IplusK=log_det_IplusK,
        log_det_IminusBstarB=log_det_ImBB,
        szego_energy=-0.5 * log_det_ImBB + 0.0,
        hs_norm_sq=float(np.sum(np.abs(pair.B) ** 2)),
        delta_m_tail=delta,
        kappa_hat=kappa,
    )


def dilated_table(table: GrunskyTable, r: float) -> GrunskyTable:
    """Table of the dilated curve: entry (k, l) scaled by r**-(k+l)."""
    if not (r > 1):
        raise DilationNotGreaterThanOne(f"r must be > 1, got {r}")
    k = np.arange(1, table.m + 1, dtype=float)
    scale = r ** (-(k[:, None] + k[None, :]))
    return GrunskyTable(table.m, table.a * scale, table.source_map_id, 0.0)


def suggest_truncation(mp: ExteriorMap, tol: float = M_AUTO_TOL, cap: int = M_AUTO_CAP) -> int:
    """Default table size: double until szego_energy stabilizes below tol."""
    size = 8
    energy = spectral_report(operators(grunsky_coefficients(mp, size))).szego_energy
    while size < cap:
        nxt = spectral_report(operators(grunsky_coefficients(mp, 2 * size))).szego_energy
        size *= 2
        if abs(nxt - energy) < tol:
            return size
        energy = nxt
    return cap


def table_to_csv(table: GrunskyTable) -> str:
    """Row-major CSV dump with header k,l,re_a,im_a at 17 significant digits."""
    lines = ["k,l,re_a,im_a"]
    for k in range(table.m):
        for el in range(table.m):
            v = table.a[k, el]
            lines.append(f"{k + 1},{el + 1},{v.real:.17g},{v.imag:.17g}")
    return "\n".join(lines) + "\n"
