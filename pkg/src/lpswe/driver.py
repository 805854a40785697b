# driver.py

"""Run orchestration: boundary conditions via ghost donors, time-step
formulas, the per-step sequence (re-initialize Pi, acoustic, combined
update) and diagnostics."""

import time
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import mesh as meshmod
from .acoustic import explicit_acoustic, implicit_acoustic
from .exceptions import CFLError, ConfigError, LpsweError, PositivityError
from .fields import ConservedField, Params, Topography, to_relaxed
from .flux_kernels import evaluate_face_fluxes
from .transport import combined_update, transport_cfl_fraction


@dataclass
class BoundaryCondition:
    """Boundary kinds per rectangle side.

    neumann and absorbing are both zero-gradient ghost copies; periodic
    pairs each boundary face with the face across the domain (both sides of
    the axis must be periodic).
    """

    left: str = "neumann"
    right: str = "neumann"
    bottom: str = "neumann"
    top: str = "neumann"

    _KINDS = ("neumann", "absorbing", "periodic")

    def __post_init__(self):
        for side in (self.left, self.right, self.bottom, self.top):
            if side not in self._KINDS:
                raise ConfigError(f"unknown boundary kind {side!r}")
        if (self.left == "periodic") != (self.right == "periodic"):
            raise ConfigError("periodic-x requires both left and right")
        if (self.bottom == "periodic") != (self.top == "periodic"):
            raise ConfigError("periodic-y requires both bottom and top")

    @classmethod
    def periodic_x(cls, y_kind="absorbing"):
        return cls(left="periodic", right="periodic",
                   bottom=y_kind, top=y_kind)

    @classmethod
    def periodic_all(cls):
        return cls(*["periodic"] * 4)


def build_donor(mesh, bc: BoundaryCondition) -> np.ndarray:
    """Interior donor cell for each ghost cell.

    Zero-gradient ghosts copy the adjacent interior cell; periodic ghosts
    copy the owner of the paired face on the opposite side.
    """
    sides = mesh.boundary_sides()
    donor = mesh.face_owner[mesh.boundary_faces].copy()
    kinds = (bc.left, bc.right, bc.bottom, bc.top)

    def pair(side_a, side_b, coord):
        ia = np.nonzero(sides == side_a)[0]
        ib = np.nonzero(sides == side_b)[0]
        if len(ia) != len(ib):
            raise ConfigError(
                f"periodic boundary has {len(ia)} faces on one side and "
                f"{len(ib)} on the other")
        fa = mesh.boundary_faces[ia]
        fb = mesh.boundary_faces[ib]
        ka = np.argsort(mesh.face_midpoint[fa, coord], kind="stable")
        kb = np.argsort(mesh.face_midpoint[fb, coord], kind="stable")
        fa, ia = fa[ka], ia[ka]
        fb, ib = fb[kb], ib[kb]
        scale = max(mesh.bbox[1] - mesh.bbox[0], mesh.bbox[3] - mesh.bbox[2])
        if (np.any(np.abs(mesh.face_midpoint[fa, coord]
                          - mesh.face_midpoint[fb, coord]) > 1e-9 * scale)
                or np.any(np.abs(mesh.face_length[fa]
                                 - mesh.face_length[fb]) > 1e-12 * scale)
                or np.any(np.abs(mesh.face_normal[fa]
                                 + mesh.face_normal[fb]) > 1e-12)):
            raise ConfigError("periodic faces do not pair up "
                              "(lengths/positions/normals mismatch)")
        donor[ia] = mesh.face_owner[fb]
        donor[ib] = mesh.face_owner[fa]

    if bc.left == "periodic":
        pair(meshmod.LEFT, meshmod.RIGHT, 1)
    if bc.bottom == "periodic":
        pair(meshmod.BOTTOM, meshmod.TOP, 0)

    # Non-periodic ghosts keep the adjacent owner as donor; sanity-check
    # that every ghost got one.
    if np.any(donor < 0) or np.any(donor >= mesh.n_cells):
        raise ConfigError("internal error: unpaired ghost cell")
    return donor


def apply_bc(c: ConservedField, mesh, donor) -> None:
    """Populate the ghost entries from their donor interior cells."""
    n = mesh.n_cells
    c.h[n:] = c.h[donor]
    c.hu[n:] = c.hu[donor]


def ghost_topography(z_interior, mesh, donor) -> Topography:
    """Extend interior bottom elevations to the ghost cells (donor copy,
    so boundary faces see no topography jump for zero-gradient sides)."""
    z = np.empty(mesh.n_total)
    z[:mesh.n_cells] = z_interior
    z[mesh.n_cells:] = z[donor]
    return Topography(z=z)


def _speed_cell_max(mesh, tau, fluxes, transport_only):
    """Per-cell max over incident faces of max(v_acou, v_trans), then the
    time-step denominator max_j(perimeter_ratio_j * that max)."""
    n = mesh.n_cells
    interior = mesh.face_neighbor < n
    vt = np.abs(fluxes.u_star)
    m = np.zeros(n)
    if transport_only:
        w_o = vt
        w_n = vt[interior]
    else:
        w_o = np.maximum(tau[mesh.face_owner] * fluxes.a, vt)
        w_n = np.maximum(tau[mesh.face_neighbor[interior]]
                         * fluxes.a[interior], vt[interior])
    np.maximum.at(m, mesh.face_owner, w_o)
    np.maximum.at(m, mesh.face_neighbor[interior], w_n)
    ratio = np.bincount(mesh.face_owner, weights=mesh.face_length,
                        minlength=n)
    ratio += np.bincount(mesh.face_neighbor[interior],
                         weights=mesh.face_length[interior], minlength=n)
    ratio /= mesh.area
    return np.max(ratio * m)


def dt_exex(mesh, tau, fluxes, p: Params, dt_max):
    """Explicit time step K_CFL / (2 max_j(ratio_j max_k max(tau_j a, |u|)))
    evaluated from the time-n fluxes, clamped to dt_max."""
    denom = _speed_cell_max(mesh, tau, fluxes, transport_only=False)
    if denom <= 0.0:
        return dt_max
    return min(p.k_cfl / (2.0 * denom), dt_max)


def dt_imex(mesh, fluxes, p: Params, dt_max):
    """IMEX time step: constrained by the transport speeds |u_star| only."""
    denom = _speed_cell_max(mesh, None, fluxes, transport_only=True)
    if denom <= 0.0:
        return dt_max
    return min(p.k_cfl / (2.0 * denom), dt_max)


@dataclass
class RunState:
    """Mutable state of an ongoing run."""

    conserved: ConservedField
    topo: Topography
    mesh: object
    params: Params
    donor: np.ndarray
    t: float = 0.0
    step: int = 0
    next_dt: Optional[float] = None   # lagged dt for IMEX


@dataclass
class RunReport:
    steps: int
    wall_time: float
    dt_history: List[float]
    mass_history: List[float]
    max_froude: float
    final: ConservedField
    t_final: float


def advance(state: RunState, t_remaining: float, dt_max: float) -> float:
    """One full step: BC, re-initialize Pi, acoustic, combined update.

    Returns the dt actually taken (truncated to t_remaining)."""
    mesh = state.mesh
    p = state.params
    apply_bc(state.conserved, mesh, state.donor)
    relaxed = to_relaxed(state.conserved, p, n_interior=mesh.n_cells)
    h_n = state.conserved.h
    fluxes_n = evaluate_face_fluxes(mesh, relaxed.u, relaxed.pi, h_n,
                                    state.topo.z, p)
    if p.scheme == "EXEX":
        dt = dt_exex(mesh, relaxed.tau, fluxes_n, p, dt_max)
        dt = min(dt, t_remaining)
        ac = explicit_acoustic(relaxed, mesh, state.topo, p, dt,
                               fluxes=fluxes_n, h_n=h_n, cfl_strict=True,
                               donor=state.donor)
    else:
        if state.next_dt is None:
            state.next_dt = dt_exex(mesh, relaxed.tau, fluxes_n, p, dt_max)
        dt = min(state.next_dt, t_remaining)
        # Lagged-dt policy: the previous step's transport speeds sized this
        # dt.  During fast transients the new speeds can overshoot it, so
        # the step is rejected and re-solved at a smaller dt until the
        # transport CFL holds (positivity requires it).
        for _ in range(20):
            try:
                ac = implicit_acoustic(relaxed, mesh, state.topo, p, dt,
                                       state.donor, fluxes_n=fluxes_n,
                                       h_n=h_n)
            except PositivityError as exc:
                dt = min(0.5 * dt, exc.suggested_dt or 0.5 * dt)
                continue
            frac = transport_cfl_fraction(mesh, ac.fluxes, dt)
            if frac <= 1.0:
                break
            dt = p.k_cfl * dt / frac
        else:
            raise CFLError("IMEX step rejected repeatedly")
        state.next_dt = dt_imex(mesh, ac.fluxes, p, dt_max)
    state.conserved = combined_update(state.conserved, ac, mesh, p, dt)
    state.t += dt
    state.step += 1
    return dt


def prepare_state(mesh, topo: Topography, initial: ConservedField,
                  bc: BoundaryCondition, p: Params) -> RunState:
    """Attach ghost storage and donors to interior-sized inputs."""
    donor = build_donor(mesh, bc)
    n = mesh.n_cells
    if len(topo.z) == n:
        topo = ghost_topography(topo.z, mesh, donor)
    if len(initial.h) == n:
        full = ConservedField(np.empty(mesh.n_total),
                              np.empty((mesh.n_total, 2)))
        full.h[:n] = initial.h
        full.hu[:n] = initial.hu
        initial = full
    return RunState(conserved=initial, topo=topo, mesh=mesh, params=p,
                    donor=donor)


def run_steps(mesh, topo: Topography, initial: ConservedField,
              bc: BoundaryCondition, p: Params, n_steps: int,
              dt_max: float) -> RunState:
    """Advance a fixed number of steps with the scheme's own dt formula."""
    state = prepare_state(mesh, topo, initial, bc, p)
    for _ in range(n_steps):
        advance(state, np.inf, dt_max)
    return state


def run(mesh, topo: Topography, initial: ConservedField,
        bc: BoundaryCondition, p: Params, t_final: float,
        callback=None, max_steps=10_000_000) -> RunReport:
    """Advance from t=0 to t_final and collect diagnostics.

    ``topo`` and ``initial`` may be interior-sized; ghosts are added here.
    ``callback(state, dt)`` runs after every step when given.
    """
    state = prepare_state(mesh, topo, initial, bc, p)
    n = mesh.n_cells
    dt_max = p.dt_max if p.dt_max is not None else max(t_final, 1e-300) / 10.0

    dts, masses = [], []
    max_fr = 0.0
    t0 = time.perf_counter()
    while state.t < t_final * (1.0 - 1e-14) and t_final > 0.0:
        if state.step >= max_steps:
            raise LpsweError(f"exceeded {max_steps} steps at t={state.t}")
        try:
            dt = advance(state, t_final - state.t, dt_max)
        except LpsweError as exc:
            raise type(exc)(f"step {state.step}: {exc}") from exc
        dts.append(dt)
        h = state.conserved.h[:n]
        masses.append(float(np.sum(mesh.area * h)))
        speed = np.hypot(state.conserved.hu[:n, 0],
                         state.conserved.hu[:n, 1]) / h
        max_fr = max(max_fr, float(np.max(speed / np.sqrt(p.g * h))))
        if callback is not None:
            callback(state, dt)
    wall = time.perf_counter() - t0
    return RunReport(steps=state.step, wall_time=wall, dt_history=dts,
                     mass_history=masses, max_froude=max_fr,
                     final=state.conserved, t_final=state.t)
