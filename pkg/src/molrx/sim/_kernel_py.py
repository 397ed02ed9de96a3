"""Pure-numpy stepping kernel.

Draw protocol per step (the compiled kernel consumes the identical stream,
so outputs are bit-for-bit equal across backends):

  1. three standard normals per free particle, ascending particle index
  2. one uniform per free particle iff the degradation probability > 0
  3. one uniform per receptor hit, in ascending particle index order
  4. one uniform per bound particle iff the backward probability > 0,
     then one uniform per released particle, both ascending

A particle "hits" the surface when the straight segment of its step first
crosses the unit sphere at some fraction s in (0, 1]; the crossing point
selects the face.  Hits on a receptor face draw the acceptance uniform
(unless the receptor is occupied and occupancy is enabled); every
unaccepted hit restores the pre-step position.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["run_realization", "locate_face"]


def locate_face(px, py, pz, tri_flat, level_offsets):
    """Quadtree descent; mirrors the compiled locator exactly."""
    n_levels = len(level_offsets) - 1
    best = -1
    best_score = -math.inf
    for f in range(level_offsets[1] - level_offsets[0]):
        score = _face_score(px, py, pz, tri_flat, level_offsets[0] + f)
        if score > best_score:
            best_score = score
            best = f
    for lvl in range(1, n_levels):
        base = level_offsets[lvl]
        parent = best
        best_score = -math.inf
        for child in range(4 * parent, 4 * parent + 4):
            score = _face_score(px, py, pz, tri_flat, base + child)
            if score > best_score:
                best_score = score
                best = child
    return best


def _face_score(px, py, pz, tri, f):
    v = tri[f]
    s0 = _triple(px, py, pz, v[0, 0], v[0, 1], v[0, 2], v[1, 0], v[1, 1], v[1, 2])
    s1 = _triple(px, py, pz, v[1, 0], v[1, 1], v[1, 2], v[2, 0], v[2, 1], v[2, 2])
    s2 = _triple(px, py, pz, v[2, 0], v[2, 1], v[2, 2], v[0, 0], v[0, 1], v[0, 2])
    return min(s0, s1, s2)


def _triple(px, py, pz, ax, ay, az, bx, by, bz):
    cx = ay * bz - az * by
    cy = az * bx - ax * bz
    cz = ax * by - ay * bx
    return px * cx + py * cy + pz * cz


def _interp(u, cdf, radii):
    i = np.searchsorted(cdf, u, side="right") - 1
    if i < 0:
        i = 0
    elif i > len(cdf) - 2:
        i = len(cdf) - 2
    frac = (u - cdf[i]) / (cdf[i + 1] - cdf[i])
    return radii[i] + frac * (radii[i + 1] - radii[i])


def run_realization(bit_generator, na, r0, sigma_step, n_steps, bin_stride,
                    p_forward, p_backward, p_degrade, occupancy_enabled,
                    tri_flat, level_offsets, is_receptor,
                    rebind_radii, rebind_cdf, out_bound, out_acct,
                    check_invariants=False):
    rng = np.random.Generator(bit_generator)
    n_faces = is_receptor.shape[0]

    # release point: all molecules start at one uniformly random point on
    # the sphere of radius r0 (equivalent to a fixed point by symmetry)
    u1 = rng.random()
    u2 = rng.random()
    cos_t = 1.0 - 2.0 * u1
    sin_t = math.sqrt(max(1.0 - cos_t * cos_t, 0.0))
    phi = 2.0 * math.pi * u2
    start = np.array([r0 * sin_t * math.cos(phi),
                      r0 * sin_t * math.sin(phi),
                      r0 * cos_t])

    pos = np.tile(start, (na, 1))
    state = np.zeros(na, dtype=np.uint8)      # 0 free, 1 bound, 2 degraded
    bind_face = np.full(na, -1, dtype=np.int64)
    bind_dir = np.zeros((na, 3))
    occ = np.zeros(n_faces, dtype=np.int64)
    n_bound = 0
    n_degraded = 0

    for step in range(1, n_steps + 1):
        free_idx = np.flatnonzero(state == 0)
        nf = free_idx.size

        old = pos[free_idx].copy()
        disp = rng.standard_normal((nf, 3)) * sigma_step
        new = old + disp

        if p_degrade > 0.0 and nf:
            dead = rng.random(nf) <= p_degrade
        else:
            dead = np.zeros(nf, dtype=bool)

        if nf:
            a = disp[:, 0] ** 2 + disp[:, 1] ** 2 + disp[:, 2] ** 2
            b = 2.0 * (old[:, 0] * disp[:, 0] + old[:, 1] * disp[:, 1]
                       + old[:, 2] * disp[:, 2])
            c = old[:, 0] ** 2 + old[:, 1] ** 2 + old[:, 2] ** 2 - 1.0
            disc = b * b - 4.0 * a * c
            cand = (~dead) & (b < 0.0) & (disc > 0.0)
            s1 = np.zeros(nf)
            if np.any(cand):
                s1[cand] = (-b[cand] - np.sqrt(disc[cand])) / (2.0 * a[cand])
            hit = cand & (s1 > 0.0) & (s1 <= 1.0)

            # particles that neither degraded nor hit simply move
            move = (~dead) & (~hit)
            pos[free_idx[move]] = new[move]
            for k in np.flatnonzero(dead):
                state[free_idx[k]] = 2
                n_degraded += 1

            for k in np.flatnonzero(hit):
                i = free_idx[k]
                qx = old[k, 0] + s1[k] * disp[k, 0]
                qy = old[k, 1] + s1[k] * disp[k, 1]
                qz = old[k, 2] + s1[k] * disp[k, 2]
                qn = math.sqrt(qx * qx + qy * qy + qz * qz)
                qx /= qn
                qy /= qn
                qz /= qn
                face = locate_face(qx, qy, qz, tri_flat, level_offsets)
                if is_receptor[face] and (not occupancy_enabled or occ[face] == 0):
                    if rng.random() <= p_forward:
                        state[i] = 1
                        bind_face[i] = face
                        bind_dir[i, 0] = qx
                        bind_dir[i, 1] = qy
                        bind_dir[i, 2] = qz
                        pos[i, 0] = qx
                        pos[i, 1] = qy
                        pos[i, 2] = qz
                        occ[face] += 1
                        n_bound += 1
                    # rejected draws restore the pre-step position, which
                    # pos[i] still holds
                # non-receptor or occupied: position stays pre-step

        if p_backward > 0.0 and n_bound:
            bound_idx = np.flatnonzero(state == 1)
            released = rng.random(bound_idx.size) <= p_backward
            for i in bound_idx[released]:
                u = rng.random()
                rs = _interp(u, rebind_cdf, rebind_radii)
                pos[i] = rs * bind_dir[i]
                occ[bind_face[i]] -= 1
                bind_face[i] = -1
                state[i] = 0
                n_bound -= 1

        if check_invariants:
            free_now = state == 0
            radii = np.linalg.norm(pos[free_now], axis=1)
            assert np.all(radii >= 1.0 - 1e-12), "free particle inside receiver"
            assert (free_now.sum() + n_bound + n_degraded) == na

        if step % bin_stride == 0:
            k = step // bin_stride - 1
            out_bound[k] = n_bound
            out_acct[k, 0] = na - n_bound - n_degraded
            out_acct[k, 1] = n_bound
            out_acct[k, 2] = n_degraded
