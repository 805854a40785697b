# transport.py

"""Transport step (upwind) and the combined conservative update.

The combined update is the production path: it advances (h, hu) from time n
in a single flux loop.  The two-step form (acoustic state then upwind
transport) is algebraically identical and is kept as a test oracle.
"""

import numpy as np

from .acoustic import AcousticResult, _face_cell_sums
from .exceptions import CFLError, PositivityError
from .fields import ConservedField, Params, RelaxedField
from .flux_kernels import FaceFlux


def transport_cfl_fraction(mesh, fluxes: FaceFlux, dt):
    """dt * max_j sum_{k: u_jk < 0} sigma_jk |u_jk|; must be <= 1."""
    n = mesh.n_cells
    u = fluxes.u_star
    l = mesh.face_length
    # Inflow for the owner when u_star < 0; for the neighbor when u_star > 0.
    w_o = np.where(u < 0.0, l * np.abs(u), 0.0)
    w_n = np.where(u > 0.0, l * np.abs(u), 0.0)
    acc = _face_cell_sums(mesh, w_o, w_n) / mesh.area
    return dt * acc.max() if n else 0.0


def _upwind(mesh, fluxes, phi):
    """Face value of phi upwinded w.r.t. the owner-frame u_star
    (owner value when u_star >= 0)."""
    return np.where(fluxes.u_star >= 0.0,
                    phi[mesh.face_owner], phi[mesh.face_neighbor])


def _check_cfl(mesh, fluxes, dt):
    frac = transport_cfl_fraction(mesh, fluxes, dt)
    if frac > 1.0 + 1e-12:
        raise CFLError(
            f"transport CFL violated: dt*max inflow sum = {frac:.3e} > 1")


def _check_h_positive(h, n):
    bad = np.nonzero(h[:n] <= 0.0)[0]
    if bad.size:
        j = int(bad[0])
        raise PositivityError(
            f"transport produced h <= 0 in cell {j}", cell=j)


def transport(relaxed_1: RelaxedField, fluxes: FaceFlux, mesh, p: Params,
              dt) -> ConservedField:
    """Upwind transport of (h, hu) built from the acoustic output:
    phi^{n+1} = L_j phi_j^{n+1-} - dt sum sigma_jk u_jk phi_face, with
    L_j = 1 + dt sum sigma_jk u_jk."""
    _check_cfl(mesh, fluxes, dt)
    n = mesh.n_cells
    h1 = 1.0 / relaxed_1.tau
    hu1 = relaxed_1.u * h1[:, None]

    lu = mesh.face_length * fluxes.u_star
    L = 1.0 + dt * _face_cell_sums(mesh, lu, -lu) / mesh.area
    if np.any(L < 0.0):
        raise CFLError("transport convexity factor L_j became negative")

    out_h = h1.copy()
    out_hu = hu1.copy()
    for phi, out, col in ((h1, out_h, None),
                          (hu1[:, 0], out_hu, 0),
                          (hu1[:, 1], out_hu, 1)):
        pf = _upwind(mesh, fluxes, phi)
        flux_sum = _face_cell_sums(mesh, lu * pf, -lu * pf) / mesh.area
        new = L * phi[:n] - dt * flux_sum
        if col is None:
            out[:n] = new
        else:
            out[:n, col] = new
    _check_h_positive(out_h, n)
    return ConservedField(out_h, out_hu)


def combined_update(c_n: ConservedField, acoustic: AcousticResult, mesh,
                    p: Params, dt) -> ConservedField:
    """Single-loop conservative update from time n:
    h^{n+1} = h^n - dt sum sigma h_face u_star;
    hu^{n+1} = hu^n - dt sum sigma (hu_face u_star + Pi_face n)."""
    fluxes = acoustic.fluxes
    _check_cfl(mesh, fluxes, dt)
    n = mesh.n_cells
    r1 = acoustic.relaxed
    h1 = 1.0 / r1.tau
    hu1 = r1.u * h1[:, None]

    lu = mesh.face_length * fluxes.u_star
    nx, ny = mesh.face_normal[:, 0], mesh.face_normal[:, 1]
    wL = mesh.face_length * fluxes.pi_star_L
    wR = mesh.face_length * fluxes.pi_star_R

    hf = _upwind(mesh, fluxes, h1)
    hux = _upwind(mesh, fluxes, hu1[:, 0])
    huy = _upwind(mesh, fluxes, hu1[:, 1])

    dh = _face_cell_sums(mesh, lu * hf, -lu * hf) / mesh.area
    dmx = _face_cell_sums(mesh, lu * hux + wL * nx,
                          -(lu * hux) - wR * nx) / mesh.area
    dmy = _face_cell_sums(mesh, lu * huy + wL * ny,
                          -(lu * huy) - wR * ny) / mesh.area

    out_h = c_n.h.copy()
    out_hu = c_n.hu.copy()
    out_h[:n] = c_n.h[:n] - dt * dh
    out_hu[:n, 0] = c_n.hu[:n, 0] - dt * dmx
    out_hu[:n, 1] = c_n.hu[:n, 1] - dt * dmy
    _check_h_positive(out_h, n)
    return ConservedField(out_h, out_hu)
