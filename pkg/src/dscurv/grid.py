"""Finite-difference discretization of the round sphere S^n, n = 1 or 2.

S^1 is a periodic uniform grid in the angle theta.  S^2 uses a
latitude-longitude grid in colatitude/longitude (phi, theta) with rings
staggered half a cell away from the poles, so no node sits at the
coordinate singularity.  Derivatives across a pole read the antipodal
ring: the point (-eps, theta) is the same point of the sphere as
(+eps, theta + pi), which gives exact ghost values for scalars and,
with a sign flip per phi index, for tensor components.

All differential operators are second-order centered differences; for
smooth fields the truncation error decreases as O(h^2) under grid
refinement.
"""

import numpy as np


class SphereGrid:
    """Nodes, round metric, Christoffel symbols, and stencil structure.

    Fields on the grid are plain ndarrays of shape ``grid.shape``
    ((n_theta,) on S^1, (n_lat, n_lon) on S^2).  Covector/tensor fields
    carry trailing coordinate axes.  Instances are immutable after
    construction and safe to share between workers.
    """

    def __init__(self, dim, resolution):
        if dim == 1:
            n = int(resolution)
            if n < 8:
                raise ValueError("S^1 grid needs at least 8 nodes")
            self.dim = 1
            self.n_theta = n
            self.dtheta = 2.0 * np.pi / n
            self.theta = self.dtheta * np.arange(n)
            self.shape = (n,)
            self.h = self.dtheta
            self.sigma = np.ones((n, 1, 1))
            self.sigma_inv = np.ones((n, 1, 1))
            self.christoffel = np.zeros((n, 1, 1, 1))
        elif dim == 2:
            try:
                nlat, nlon = resolution
            except TypeError:
                raise ValueError("S^2 resolution must be a (n_lat, n_lon) pair")
            nlat, nlon = int(nlat), int(nlon)
            if nlat < 8 or nlon < 8:
                raise ValueError("S^2 grid needs at least 8 nodes per direction")
            if nlon % 2 != 0:
                raise ValueError("n_lon must be even for the antipodal pole closure")
            self.dim = 2
            self.n_lat, self.n_lon = nlat, nlon
            self.dphi = np.pi / nlat
            self.dtheta = 2.0 * np.pi / nlon
            self.phi = self.dphi * (np.arange(nlat) + 0.5)
            self.theta = self.dtheta * np.arange(nlon)
            self.shape = (nlat, nlon)
            sin_phi = np.sin(self.phi)
            cos_phi = np.cos(self.phi)
            self.h = float(max(self.dphi, self.dtheta * sin_phi.max()))
            sigma = np.zeros((nlat, nlon, 2, 2))
            sigma[..., 0, 0] = 1.0
            sigma[..., 1, 1] = (sin_phi ** 2)[:, None]
            self.sigma = sigma
            sigma_inv = np.zeros_like(sigma)
            sigma_inv[..., 0, 0] = 1.0
            sigma_inv[..., 1, 1] = (sin_phi ** -2)[:, None]
            self.sigma_inv = sigma_inv
            gamma = np.zeros((nlat, nlon, 2, 2, 2))
            gamma[..., 0, 1, 1] = (-sin_phi * cos_phi)[:, None]
            cot = (cos_phi / sin_phi)[:, None]
            gamma[..., 1, 0, 1] = cot
            gamma[..., 1, 1, 0] = cot
            self.christoffel = gamma
        else:
            raise ValueError(f"unsupported sphere dimension {dim!r}")
        self.node_count = int(np.prod(self.shape))
        self._stencil_table = None

    # -- coordinates ---------------------------------------------------

    def coords(self):
        """Per-node coordinate meshes, each of shape ``grid.shape``."""
        if self.dim == 1:
            return (self.theta,)
        phi_mesh = np.broadcast_to(self.phi[:, None], self.shape)
        theta_mesh = np.broadcast_to(self.theta[None, :], self.shape)
        return (phi_mesh, theta_mesh)

    @property
    def coord_names(self):
        return ("theta",) if self.dim == 1 else ("phi", "theta")

    def refine(self):
        """Grid with spacing halved in every direction."""
        if self.dim == 1:
            return SphereGrid(1, 2 * self.n_theta)
        return SphereGrid(2, (2 * self.n_lat, 2 * self.n_lon))

    def check_field(self, f):
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise ValueError(f"field shape {f.shape} does not match grid {self.shape}")
        return f

    # -- raw coordinate partials ----------------------------------------

    def _pad_phi(self, f, parity):
        half = self.n_lon // 2
        top = parity * np.roll(f[0], half)
        bot = parity * np.roll(f[-1], half)
        return np.concatenate([top[None], f, bot[None]], axis=0)

    def partial_gradient(self, f, phi_parity=1.0):
        """Centered-difference partials d_i f, shape ``(*shape, dim)``.

        phi_parity is the sign the component field picks up when read
        through a pole (-1 for one phi index, +1 otherwise); it only
        affects S^2 pole rings.
        """
        f = self.check_field(f)
        if self.dim == 1:
            d = (np.roll(f, -1) - np.roll(f, 1)) / (2.0 * self.dtheta)
            return d[:, None]
        pad = self._pad_phi(f, phi_parity)
        dphi = (pad[2:] - pad[:-2]) / (2.0 * self.dphi)
        dtheta = (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2.0 * self.dtheta)
        return np.stack([dphi, dtheta], axis=-1)

    def partial_hessian(self, f, phi_parity=1.0):
        """Centered second partials d_ij f, shape ``(*shape, dim, dim)``,
        symmetric by construction (one mixed stencil serves both slots)."""
        f = self.check_field(f)
        if self.dim == 1:
            d2 = (np.roll(f, -1) - 2.0 * f + np.roll(f, 1)) / self.dtheta ** 2
            return d2[:, None, None]
        pad = self._pad_phi(f, phi_parity)
        d2phi = (pad[2:] - 2.0 * f + pad[:-2]) / self.dphi ** 2
        d2theta = (np.roll(f, -1, axis=1) - 2.0 * f + np.roll(f, 1, axis=1)) / self.dtheta ** 2
        dtheta_pad = (np.roll(pad, -1, axis=1) - np.roll(pad, 1, axis=1)) / (2.0 * self.dtheta)
        mixed = (dtheta_pad[2:] - dtheta_pad[:-2]) / (2.0 * self.dphi)
        hess = np.empty(self.shape + (2, 2))
        hess[..., 0, 0] = d2phi
        hess[..., 0, 1] = mixed
        hess[..., 1, 0] = mixed
        hess[..., 1, 1] = d2theta
        return hess

    # -- stencil structure (for sparse Jacobians) -----------------------

    def stencil_table(self):
        """For each flat node index, the sorted flat indices of nodes its
        finite-difference stencil reads (including pole/periodic images)."""
        if self._stencil_table is not None:
            return self._stencil_table
        table = []
        if self.dim == 1:
            n = self.n_theta
            for i in range(n):
                table.append(sorted({(i - 1) % n, i, (i + 1) % n}))
        else:
            nlat, nlon = self.n_lat, self.n_lon
            half = nlon // 2
            for j in range(nlat):
                for i in range(nlon):
                    nodes = set()
                    for dj in (-1, 0, 1):
                        for di in (-1, 0, 1):
                            jj, ii = j + dj, (i + di) % nlon
                            if jj < 0:
                                jj, ii = 0, (ii + half) % nlon
                            elif jj >= nlat:
                                jj, ii = nlat - 1, (ii + half) % nlon
                            nodes.add(jj * nlon + ii)
                    table.append(sorted(nodes))
        self._stencil_table = table
        return table


def build_grid(dim, resolution):
    """Construct a SphereGrid; thin wrapper kept as the public entry point."""
    return SphereGrid(dim, resolution)


def covariant_gradient(u, grid):
    """Round-metric covariant gradient components u_i (index lowering is
    the identity on partials; raising is a separate contraction)."""
    return grid.partial_gradient(u)


def covariant_hessian(u, grid):
    """Round-metric covariant Hessian: d_ij u - Gamma^k_ij d_k u."""
    du = grid.partial_gradient(u)
    d2u = grid.partial_hessian(u)
    return d2u - np.einsum("...kij,...k->...ij", grid.christoffel, du)
