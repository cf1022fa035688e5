"""Transfinite quad grids and mapped finite-difference operators.

The solver domains are curvilinear quadrilaterals (four parametrized edges
meeting at corners).  A Coons patch fills the interior; all derivative
operators are assembled as sparse matrices acting on the flattened node
vector, with metric terms differenced numerically, so any smooth edge set
works unchanged.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


def _d1(n, h):
    """2nd-order first-derivative matrix on a uniform 1-D grid."""
    e = np.ones(n)
    m = sp.diags([-e / (2 * h), e / (2 * h)], [-1, 1], shape=(n, n)).tolil()
    m[0, :3] = np.array([-1.5, 2.0, -0.5]) / h
    m[-1, -3:] = np.array([0.5, -2.0, 1.5]) / h
    return m.tocsr()


def _d2(n, h):
    """2nd-order second-derivative matrix on a uniform 1-D grid."""
    e = np.ones(n)
    m = sp.diags([e, -2 * e, e], [-1, 0, 1], shape=(n, n)).tolil()
    m[0, :4] = np.array([2.0, -5.0, 4.0, -1.0])
    m[-1, -4:] = np.array([-1.0, 4.0, -5.0, 2.0])
    return (m / h ** 2).tocsr()


@dataclass
class QuadGrid:
    """Structured grid over a four-sided domain with sparse mapped operators.

    Edges are callables t in [0,1] -> (x, y) with the corner matching
    south(0)=west(0), south(1)=east(0), north(0)=west(1), north(1)=east(1).
    Node (i, j) sits at parameter (p_i, q_j); flattening is row-major in
    (i, j).
    """

    south: object
    north: object
    west: object
    east: object
    nx: int
    ny: int
    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = np.linspace(0.0, 1.0, self.nx)
        q = np.linspace(0.0, 1.0, self.ny)
        sx, sy = self.south(p)
        nx_, ny_ = self.north(p)
        wx, wy = self.west(q)
        ex, ey = self.east(q)
        c00 = np.array([sx[0], sy[0]])
        c10 = np.array([sx[-1], sy[-1]])
        c01 = np.array([nx_[0], ny_[0]])
        c11 = np.array([nx_[-1], ny_[-1]])
        for a, b in (((wx[0], wy[0]), c00), ((ex[0], ey[0]), c10),
                     ((wx[-1], wy[-1]), c01), ((ex[-1], ey[-1]), c11)):
            if not np.allclose(a, b, rtol=0, atol=1e-9):
                raise ValueError(f"edge corners do not match: {a} vs {b}")
        P, Q = np.meshgrid(p, q, indexing="ij")

        def coons(se, ne, we, ee, f00, f10, f01, f11):
            return ((1 - Q) * np.tile(se[:, None], (1, self.ny))
                    + Q * np.tile(ne[:, None], (1, self.ny))
                    + (1 - P) * np.tile(we[None, :], (self.nx, 1))
                    + P * np.tile(ee[None, :], (self.nx, 1))
                    - ((1 - P) * (1 - Q) * f00 + P * (1 - Q) * f10
                       + (1 - P) * Q * f01 + P * Q * f11))

        self.x = coons(sx, nx_, wx, ex, c00[0], c10[0], c01[0], c11[0])
        self.y = coons(sy, ny_, wy, ey, c00[1], c10[1], c01[1], c11[1])
        self.hp = p[1] - p[0]
        self.hq = q[1] - q[0]
        self._build_operators()

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def n_nodes(self):
        return self.nx * self.ny

    def _build_operators(self):
        nx, ny = self.nx, self.ny
        ixp = sp.identity(nx, format="csr")
        ixq = sp.identity(ny, format="csr")
        self.Dp = sp.kron(_d1(nx, self.hp), ixq).tocsr()
        self.Dq = sp.kron(ixp, _d1(ny, self.hq)).tocsr()
        self.Dpp = sp.kron(_d2(nx, self.hp), ixq).tocsr()
        self.Dqq = sp.kron(ixp, _d2(ny, self.hq)).tocsr()
        self.Dpq = (sp.kron(_d1(nx, self.hp), ixq) @ sp.kron(ixp, _d1(ny, self.hq))).tocsr()
        xf, yf = self.x.ravel(), self.y.ravel()
        x_p, x_q = self.Dp @ xf, self.Dq @ xf
        y_p, y_q = self.Dp @ yf, self.Dq @ yf
        jac = x_p * y_q - x_q * y_p
        if np.any(jac == 0) or (np.any(jac > 0) and np.any(jac < 0)):
            raise ValueError("grid map folds over itself (mixed Jacobian sign)")
        self.jac = jac
        self.p_x = y_q / jac
        self.p_y = -x_q / jac
        self.q_x = -y_p / jac
        self.q_y = x_p / jac
        # second derivatives of the inverse map, by differencing its gradient
        def hess(fx, fy):
            fxx = self.p_x * (self.Dp @ fx) + self.q_x * (self.Dq @ fx)
            fxy = self.p_y * (self.Dp @ fx) + self.q_y * (self.Dq @ fx)
            fyy = self.p_y * (self.Dp @ fy) + self.q_y * (self.Dq @ fy)
            return fxx, fxy, fyy

        self.p_xx, self.p_xy, self.p_yy = hess(self.p_x, self.p_y)
        self.q_xx, self.q_xy, self.q_yy = hess(self.q_x, self.q_y)

    # -- field calculus ----------------------------------------------------
    def gradient(self, f):
        """Cartesian gradient of a node field (arrays of the grid shape)."""
        ff = np.asarray(f).ravel()
        fp, fq = self.Dp @ ff, self.Dq @ ff
        gx = (self.p_x * fp + self.q_x * fq).reshape(self.shape)
        gy = (self.p_y * fp + self.q_y * fq).reshape(self.shape)
        return gx, gy

    def operator(self, a11, a12, a22):
        """Sparse matrix of a11 d_xx + 2 a12 d_xy + a22 d_yy on node fields."""
        a11 = np.asarray(a11).ravel()
        a12 = np.asarray(a12).ravel()
        a22 = np.asarray(a22).ravel()
        m11 = a11 * self.p_x ** 2 + 2 * a12 * self.p_x * self.p_y + a22 * self.p_y ** 2
        m22 = a11 * self.q_x ** 2 + 2 * a12 * self.q_x * self.q_y + a22 * self.q_y ** 2
        m12 = (a11 * self.p_x * self.q_x + a12 * (self.p_x * self.q_y + self.p_y * self.q_x)
               + a22 * self.p_y * self.q_y)
        n1 = a11 * self.p_xx + 2 * a12 * self.p_xy + a22 * self.p_yy
        n2 = a11 * self.q_xx + 2 * a12 * self.q_xy + a22 * self.q_yy
        return (sp.diags(m11) @ self.Dpp + sp.diags(2 * m12) @ self.Dpq
                + sp.diags(m22) @ self.Dqq + sp.diags(n1) @ self.Dp
                + sp.diags(n2) @ self.Dq).tocsr()

    def directional_rows(self, vx, vy):
        """Sparse matrix whose rows are (vx, vy) . grad at every node."""
        vx = np.asarray(vx).ravel()
        vy = np.asarray(vy).ravel()
        cp = vx * self.p_x + vy * self.p_y
        cq = vx * self.q_x + vy * self.q_y
        return (sp.diags(cp) @ self.Dp + sp.diags(cq) @ self.Dq).tocsr()

    def edge_nodes(self, edge):
        """Flat indices of an edge's nodes, ordered along its parameter."""
        nx, ny = self.nx, self.ny
        if edge == "south":
            return np.arange(nx) * ny
        if edge == "north":
            return np.arange(nx) * ny + (ny - 1)
        if edge == "west":
            return np.arange(ny)
        if edge == "east":
            return (nx - 1) * ny + np.arange(ny)
        raise ValueError(edge)

    def edge_normals(self, edge):
        """Unit outward normals along an edge, from the grid metric."""
        idx = self.edge_nodes(edge)
        if edge in ("south", "north"):
            gxv, gyv = self.q_x[idx], self.q_y[idx]
            sign = -1.0 if edge == "south" else 1.0
        else:
            gxv, gyv = self.p_x[idx], self.p_y[idx]
            sign = -1.0 if edge == "west" else 1.0
        norm = np.hypot(gxv, gyv)
        return sign * gxv / norm, sign * gyv / norm


def circle_arc(center, radius, ang0, ang1):
    """Edge callable for a circular arc swept from ang0 to ang1."""
    cx, cy = center

    def edge(t):
        a = ang0 + (ang1 - ang0) * np.asarray(t, float)
        return cx + radius * np.cos(a), cy + radius * np.sin(a)

    return edge


def line_segment(a, b):
    """Edge callable for the straight segment from a to b."""
    ax, ay = a
    bx, by = b

    def edge(t):
        t = np.asarray(t, float)
        return ax + (bx - ax) * t, ay + (by - ay) * t

    return edge


def polyline_edge(points):
    """Edge callable interpolating a polyline at uniform parameter values."""
    pts = np.asarray(points, float)
    n = len(pts)
    s = np.linspace(0.0, 1.0, n)

    def edge(t):
        t = np.asarray(t, float)
        return np.interp(t, s, pts[:, 0]), np.interp(t, s, pts[:, 1])

    return edge
