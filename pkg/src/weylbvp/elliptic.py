"""Finite-difference second-order elliptic operators on an interval or
rectangle, split into interior/boundary blocks, with the induced boundary
triple (Dirichlet operator, harmonic-type extension, discrete
Dirichlet-to-Neumann map).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    NonPositiveCoefficient,
    RankDeficientCoupling,
    SingularSystem,
    SpectrumPoint,
)
from .krein import COND_LIMIT, KreinSpace
from .triple import BoundaryTriple


def _sampler(c):
    """Turn a constant or callable coefficient into a callable."""
    if callable(c):
        return c
    val = float(c)
    return lambda *args: val


@dataclass(frozen=True)
class DiscreteElliptic:
    """Stencil matrix of -div(a grad u) + a0 u split by interior/boundary nodes.

    ``l_ii`` acts interior-to-interior (the Dirichlet operator), ``l_ib``
    couples boundary values into interior equations, ``l_bi`` = l_ibᵀ, and
    ``weight`` is the quadrature weight h^d of the interior inner product.
    """

    dim: int
    shape: tuple
    spacing: float
    l_ii: np.ndarray = field(repr=False)
    l_ib: np.ndarray = field(repr=False)
    l_bi: np.ndarray = field(repr=False)
    l_bb: np.ndarray = field(repr=False)
    interior_coords: np.ndarray = field(repr=False)
    boundary_coords: np.ndarray = field(repr=False)

    @property
    def n_interior(self) -> int:
        return self.l_ii.shape[0]

    @property
    def n_boundary(self) -> int:
        return self.l_ib.shape[1]

    @property
    def weight(self) -> float:
        return self.spacing ** self.dim

    @cached_property
    def dirichlet_eigs(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.l_ii)

    def dirichlet_operator(self) -> np.ndarray:
        return self.l_ii.copy()

    def default_eta(self) -> float:
        return float(self.dirichlet_eigs[0]) - 1.0

    def eta_extension(self, eta: float) -> np.ndarray:
        """E_eta with (L_II - eta) E_eta + L_IB = 0."""
        if np.min(np.abs(self.dirichlet_eigs - eta)) < 1e-10 * max(
                1.0, float(np.max(np.abs(self.dirichlet_eigs)))):
            raise SpectrumPoint(f"eta={eta} lies in the Dirichlet spectrum")
        return -np.linalg.solve(self.l_ii - eta * np.eye(self.n_interior), self.l_ib)


def build_1d(n: int, p=1.0, a=0.0, interval=(0.0, 1.0)) -> DiscreteElliptic:
    """Three-point stencil for -(p u')' + a u with n interior nodes.

    Boundary nodes ordered (left, right).
    """
    if n < 3:
        raise NonPositiveCoefficient("need at least 3 interior nodes")
    x0, x1 = float(interval[0]), float(interval[1])
    h = (x1 - x0) / (n + 1)
    psamp, asamp = _sampler(p), _sampler(a)
    xs = x0 + h * np.arange(n + 2)            # nodes 0..n+1
    phalf = np.array([psamp(x0 + h * (k + 0.5)) for k in range(n + 1)], dtype=float)
    if np.any(phalf <= 0):
        raise NonPositiveCoefficient("diffusion coefficient p must be positive")
    avals = np.array([asamp(x) for x in xs], dtype=float)

    l_ii = np.zeros((n, n))
    for i in range(n):           # interior node i+1
        l_ii[i, i] = (phalf[i] + phalf[i + 1]) / h**2 + avals[i + 1]
        if i > 0:
            l_ii[i, i - 1] = -phalf[i] / h**2
        if i < n - 1:
            l_ii[i, i + 1] = -phalf[i + 1] / h**2
    l_ib = np.zeros((n, 2))
    l_ib[0, 0] = -phalf[0] / h**2
    l_ib[-1, 1] = -phalf[n] / h**2
    l_bb = np.diag([phalf[0] / h**2 + avals[0], phalf[n] / h**2 + avals[n + 1]])
    return DiscreteElliptic(
        dim=1, shape=(n,), spacing=h,
        l_ii=l_ii, l_ib=l_ib, l_bi=l_ib.T.copy(), l_bb=l_bb,
        interior_coords=xs[1:-1].reshape(-1, 1),
        boundary_coords=np.array([[x0], [x1]]),
    )


def build_2d(nx: int, ny: int, a11=1.0, a22=1.0, a=0.0,
             rect=(0.0, 1.0, 0.0, 1.0)) -> DiscreteElliptic:
    """Five-point stencil for -(a11 u_x)_x - (a22 u_y)_y + a u on a rectangle.

    Requires equal spacing in both directions.  Interior nodes are numbered
    x-fastest; boundary nodes run counterclockwise from the lower-left,
    corners excluded (they never touch an interior stencil).
    """
    if nx < 3 or ny < 3:
        raise NonPositiveCoefficient("need at least 3 interior nodes per direction")
    x0, x1, y0, y1 = (float(v) for v in rect)
    hx = (x1 - x0) / (nx + 1)
    hy = (y1 - y0) / (ny + 1)
    if abs(hx - hy) > 1e-12 * max(hx, hy):
        raise NonPositiveCoefficient("grid spacing must match in both directions")
    h = hx
    s11, s22, sa = _sampler(a11), _sampler(a22), _sampler(a)

    def xpos(i):
        return x0 + h * i

    def ypos(j):
        return y0 + h * j

    def idx(i, j):               # interior (i=1..nx, j=1..ny)
        return (j - 1) * nx + (i - 1)

    # boundary ordering: bottom L->R, right B->T, top R->L, left T->B
    blist = ([("b", i, 0) for i in range(1, nx + 1)]
             + [("r", nx + 1, j) for j in range(1, ny + 1)]
             + [("t", i, ny + 1) for i in range(nx, 0, -1)]
             + [("l", 0, j) for j in range(ny, 0, -1)])
    bindex = {(i, j): k for k, (_, i, j) in enumerate(blist)}

    n_i, n_b = nx * ny, len(blist)
    l_ii = np.zeros((n_i, n_i))
    l_ib = np.zeros((n_i, n_b))
    for j in range(1, ny + 1):
        for i in range(1, nx + 1):
            row = idx(i, j)
            cw = s11(xpos(i - 0.5), ypos(j))
            ce = s11(xpos(i + 0.5), ypos(j))
            cs = s22(xpos(i), ypos(j - 0.5))
            cn = s22(xpos(i), ypos(j + 0.5))
            if min(cw, ce, cs, cn) <= 0:
                raise NonPositiveCoefficient("diffusion coefficients must be positive")
            l_ii[row, row] = (cw + ce + cs + cn) / h**2 + sa(xpos(i), ypos(j))
            for coef, ii, jj in ((cw, i - 1, j), (ce, i + 1, j),
                                 (cs, i, j - 1), (cn, i, j + 1)):
                val = -coef / h**2
                if 1 <= ii <= nx and 1 <= jj <= ny:
                    l_ii[row, idx(ii, jj)] = val
                else:
                    l_ib[row, bindex[(ii, jj)]] = val
    l_bb = np.diag([sa(xpos(i), ypos(j)) for _, i, j in blist])
    icoords = np.array([[xpos(i), ypos(j)]
                        for j in range(1, ny + 1) for i in range(1, nx + 1)])
    bcoords = np.array([[xpos(i), ypos(j)] for _, i, j in blist])
    return DiscreteElliptic(
        dim=2, shape=(nx, ny), spacing=h,
        l_ii=l_ii, l_ib=l_ib, l_bi=l_ib.T.copy(), l_bb=l_bb,
        interior_coords=icoords, boundary_coords=bcoords,
    )


@dataclass(frozen=True)
class EllipticTriple:
    """Boundary triple of a discrete elliptic operator.

    States f = f_D + E_eta y are parameterized by the Dirichlet part f_D and
    the boundary trace y; Gamma_0 reads y, Gamma_1 is the (sign-flipped,
    weight-scaled) discrete conormal derivative of f_D.
    """

    de: DiscreteElliptic
    eta: float
    extension: np.ndarray = field(repr=False)
    bt: BoundaryTriple = field(repr=False)

    @property
    def weight(self) -> float:
        return self.de.weight

    def gamma(self, lam: complex) -> np.ndarray:
        """(I + (lam - eta)(T_D - lam)^{-1}) E_eta."""
        td = self.de.l_ii
        n = self.de.n_interior
        sol = np.linalg.solve(td - lam * np.eye(n), self.extension)
        return self.extension + (lam - self.eta) * sol

    def weyl(self, lam: complex) -> np.ndarray:
        """h^d (eta - lam) L_BI (T_D - lam)^{-1} E_eta."""
        td = self.de.l_ii
        n = self.de.n_interior
        sol = np.linalg.solve(td - lam * np.eye(n), self.extension)
        return self.weight * (self.eta - lam) * (self.de.l_bi @ sol)

    def recover_parameters(self, f: np.ndarray, g: np.ndarray):
        """Split a pair {f, g} in the relation into (f_D, y).

        When L_IB has a nontrivial kernel (corner aliasing in 2D) the
        minimum-norm trace is returned.
        """
        y, *_ = np.linalg.lstsq(self.de.l_ib, g - self.de.l_ii @ f, rcond=None)
        return f - self.extension @ y, y


def elliptic_triple(de: DiscreteElliptic, eta: float | None = None) -> EllipticTriple:
    """Build the boundary triple of a discrete elliptic operator."""
    if eta is None:
        eta = de.default_eta()
    # every boundary node must couple to the interior (a disconnected node
    # would make its trace coordinate meaningless); note that in 2D the two
    # neighbors of a corner alias the same interior row, so full column rank
    # is structurally impossible and is not required by the construction
    colnorm = np.linalg.norm(de.l_ib, axis=0)
    if np.any(colnorm <= 1e-12 * max(1.0, float(colnorm.max(initial=0.0)))):
        raise RankDeficientCoupling("a boundary node is disconnected from the interior")
    ext = de.eta_extension(eta)
    n, nb = de.n_interior, de.n_boundary
    w = de.weight
    t_basis = np.block([
        [np.eye(n), ext],
        [de.l_ii, eta * ext],
    ])
    g0 = np.hstack([np.zeros((nb, n)), np.eye(nb)])
    g1 = np.hstack([-w * de.l_bi, np.zeros((nb, nb))])
    state = KreinSpace(n, gram=w * np.eye(n))
    bt = BoundaryTriple(state, nb, t_basis, g0, g1)
    return EllipticTriple(de=de, eta=float(eta), extension=ext, bt=bt)


def direct_solve(et: EllipticTriple, tau, lam: complex, g: np.ndarray) -> np.ndarray:
    """Independent oracle: assemble and solve the coupled interior/boundary
    system (T_D - lam) f_D + (eta - lam) E_eta y = g, tau(lam) y = h^d L_BI f_D.
    """
    de = et.de
    n, nb = de.n_interior, de.n_boundary
    w = de.weight
    sys = np.zeros((n + nb, n + nb), dtype=complex)
    sys[:n, :n] = de.l_ii - lam * np.eye(n)
    sys[:n, n:] = (et.eta - lam) * et.extension
    sys[n:, :n] = -w * de.l_bi
    sys[n:, n:] = tau.eval(lam)
    rhs = np.concatenate([np.asarray(g, dtype=complex), np.zeros(nb, dtype=complex)])
    sv = np.linalg.svd(sys, compute_uv=False)
    if sv[-1] <= sv[0] / COND_LIMIT:
        raise SingularSystem(f"coupled system singular at lambda={lam}")
    sol = np.linalg.solve(sys, rhs)
    return sol[:n] + et.extension @ sol[n:]
