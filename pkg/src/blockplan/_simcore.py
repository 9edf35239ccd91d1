"""Numba kernels for the box-stack simulator.

Sequential-impulse contact solver with warm starting, Coulomb friction
(disc clamp) and split-impulse position correction.  Box-box contacts come
from a 15-axis separating-axis test followed by reference-face clipping, or a
single closest-point contact for edge-edge cases.  Body index -1 is the
ground.
"""

import numpy as np
from numba import njit

# solver status codes
OK = 0
BLOWUP = 1

MAX_PER_PAIR = 8


@njit(cache=True)
def quat_to_mat(q, R):
    w, x, y, z = q[0], q[1], q[2], q[3]
    R[0, 0] = 1 - 2 * (y * y + z * z)
    R[0, 1] = 2 * (x * y - w * z)
    R[0, 2] = 2 * (x * z + w * y)
    R[1, 0] = 2 * (x * y + w * z)
    R[1, 1] = 1 - 2 * (x * x + z * z)
    R[1, 2] = 2 * (y * z - w * x)
    R[2, 0] = 2 * (x * z - w * y)
    R[2, 1] = 2 * (y * z + w * x)
    R[2, 2] = 1 - 2 * (x * x + y * y)


@njit(cache=True)
def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@njit(cache=True)
def _cross(a, b, out):
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]


@njit(cache=True)
def _push(k, maxc, ci, cj, cn, cp, cd, i, j, n, p, depth):
    if k >= maxc:
        return k
    ci[k] = i
    cj[k] = j
    for a in range(3):
        cn[k, a] = n[a]
        cp[k, a] = p[a]
    cd[k] = depth
    return k + 1


@njit(cache=True)
def _clip(inp, nin, out, u, off):
    # keep points with u . x <= off
    nout = 0
    for a in range(nin):
        b = (a + 1) % nin
        da = _dot(u, inp[a]) - off
        db = _dot(u, inp[b]) - off
        if da <= 0.0:
            out[nout, :] = inp[a, :]
            nout += 1
        if (da < 0.0 and db > 0.0) or (da > 0.0 and db < 0.0):
            t = da / (da - db)
            for c in range(3):
                out[nout, c] = inp[a, c] + t * (inp[b, c] - inp[a, c])
            nout += 1
    return nout


@njit(cache=True)
def _face_contacts(ri, pr, Rr, hr, axis, nref, ii, pi_, Ri, hi, margin,
                   k, maxc, ci, cj, cn, cp, cd, buf1, buf2, tmp, swap):
    """Clip the incident face of box ``ii`` against reference face of box ``ri``.

    Contacts are stored as (ri, ii) with normal ``nref``, or as (ii, ri) with
    the normal flipped when ``swap`` is set, so pair order never depends on
    which face was chosen as reference.
    """
    plane = _dot(nref, pr) + hr[axis]
    # incident face: the one most anti-parallel to nref
    best = -1.0
    m = 0
    for a in range(3):
        d = abs(Ri[0, a] * nref[0] + Ri[1, a] * nref[1] + Ri[2, a] * nref[2])
        if d > best:
            best = d
            m = a
    sgn = 1.0
    if Ri[0, m] * nref[0] + Ri[1, m] * nref[1] + Ri[2, m] * nref[2] > 0.0:
        sgn = -1.0
    m1 = (m + 1) % 3
    m2 = (m + 2) % 3
    s1 = (1.0, -1.0, -1.0, 1.0)
    s2 = (1.0, 1.0, -1.0, -1.0)
    for v in range(4):
        for c in range(3):
            buf1[v, c] = (pi_[c] + sgn * hi[m] * Ri[c, m]
                          + s1[v] * hi[m1] * Ri[c, m1] + s2[v] * hi[m2] * Ri[c, m2])
    nv = 4
    a1 = (axis + 1) % 3
    a2 = (axis + 2) % 3
    src = buf1
    dst = buf2
    for side in range(4):
        ax = a1 if side < 2 else a2
        sign = 1.0 if side % 2 == 0 else -1.0
        for c in range(3):
            tmp[c] = sign * Rr[c, ax]
        off = hr[ax] + _dot(tmp, pr)
        nv = _clip(src, nv, dst, tmp, off)
        if nv == 0:
            return k
        src, dst = dst, src
    flip = np.empty(3)
    for c in range(3):
        flip[c] = -nref[c]
    for v in range(nv):
        depth = plane - _dot(nref, src[v])
        if depth >= -margin:
            if swap:
                k = _push(k, maxc, ci, cj, cn, cp, cd, ii, ri, flip, src[v], depth)
            else:
                k = _push(k, maxc, ci, cj, cn, cp, cd, ri, ii, nref, src[v], depth)
    return k


@njit(cache=True)
def _box_box(a, b, pos, R, half, margin, k, maxc, ci, cj, cn, cp, cd, buf1, buf2, tmp):
    pa = pos[a]
    pb = pos[b]
    Ra = R[a]
    Rb = R[b]
    ha = half[a]
    hb = half[b]
    d = np.empty(3)
    for c in range(3):
        d[c] = pb[c] - pa[c]
    L = np.empty(3)
    ua = np.empty(3)
    ub = np.empty(3)

    best_ab = np.full(2, 1e30)
    axis_ab = np.zeros(2, dtype=np.int64)
    for box in range(2):
        for ax in range(3):
            for c in range(3):
                L[c] = Ra[c, ax] if box == 0 else Rb[c, ax]
            ra = 0.0
            rb = 0.0
            for m in range(3):
                ra += ha[m] * abs(L[0] * Ra[0, m] + L[1] * Ra[1, m] + L[2] * Ra[2, m])
                rb += hb[m] * abs(L[0] * Rb[0, m] + L[1] * Rb[1, m] + L[2] * Rb[2, m])
            ov = ra + rb - abs(_dot(d, L))
            if ov < -margin:
                return k
            if ov < best_ab[box]:
                best_ab[box] = ov
                axis_ab[box] = ax
    # hysteresis: box b's face must win clearly, so near-ties stay on box a
    face_on_a = not (best_ab[1] < best_ab[0] - (0.05 * abs(best_ab[0]) + 1e-4))
    best_face = best_ab[0] if face_on_a else best_ab[1]
    face_axis = axis_ab[0] if face_on_a else axis_ab[1]

    best_edge = 1e30
    ea = -1
    eb = -1
    for i in range(3):
        for j in range(3):
            for c in range(3):
                ua[c] = Ra[c, i]
                ub[c] = Rb[c, j]
            _cross(ua, ub, L)
            ln = np.sqrt(_dot(L, L))
            if ln < 1e-6:
                continue
            for c in range(3):
                L[c] /= ln
            ra = 0.0
            rb = 0.0
            for m in range(3):
                ra += ha[m] * abs(L[0] * Ra[0, m] + L[1] * Ra[1, m] + L[2] * Ra[2, m])
                rb += hb[m] * abs(L[0] * Rb[0, m] + L[1] * Rb[1, m] + L[2] * Rb[2, m])
            ov = ra + rb - abs(_dot(d, L))
            if ov < -margin:
                return k
            if ov < best_edge:
                best_edge = ov
                ea = i
                eb = j

    nrm = np.empty(3)
    if ea >= 0 and best_edge < best_face - (0.05 * abs(best_face) + 1e-4):
        for c in range(3):
            ua[c] = Ra[c, ea]
            ub[c] = Rb[c, eb]
        _cross(ua, ub, nrm)
        ln = np.sqrt(_dot(nrm, nrm))
        for c in range(3):
            nrm[c] /= ln
        if _dot(nrm, d) < 0.0:
            for c in range(3):
                nrm[c] = -nrm[c]
        # supporting edges
        qa = np.empty(3)
        qb = np.empty(3)
        for c in range(3):
            qa[c] = pa[c]
            qb[c] = pb[c]
        for m in range(3):
            if m != ea:
                s = 1.0 if (nrm[0] * Ra[0, m] + nrm[1] * Ra[1, m] + nrm[2] * Ra[2, m]) > 0 else -1.0
                for c in range(3):
                    qa[c] += s * ha[m] * Ra[c, m]
            if m != eb:
                s = -1.0 if (nrm[0] * Rb[0, m] + nrm[1] * Rb[1, m] + nrm[2] * Rb[2, m]) > 0 else 1.0
                for c in range(3):
                    qb[c] += s * hb[m] * Rb[c, m]
        # closest points of the two edge lines, clamped to the edges
        for c in range(3):
            tmp[c] = qb[c] - qa[c]
        uab = _dot(ua, ub)
        q1 = _dot(ua, tmp)
        q2 = _dot(ub, tmp)
        den = 1.0 - uab * uab
        if den < 1e-9:
            s_a = 0.0
            s_b = 0.0
        else:
            s_a = (q1 - uab * q2) / den
            s_b = (uab * q1 - q2) / den
        s_a = min(max(s_a, -ha[ea]), ha[ea])
        s_b = min(max(s_b, -hb[eb]), hb[eb])
        for c in range(3):
            tmp[c] = 0.5 * (qa[c] + s_a * ua[c] + qb[c] + s_b * ub[c])
        return _push(k, maxc, ci, cj, cn, cp, cd, a, b, nrm, tmp, best_edge)

    if face_on_a:
        for c in range(3):
            nrm[c] = Ra[c, face_axis]
        if _dot(nrm, d) < 0.0:
            for c in range(3):
                nrm[c] = -nrm[c]
        return _face_contacts(a, pa, Ra, ha, face_axis, nrm, b, pb, Rb, hb, margin,
                              k, maxc, ci, cj, cn, cp, cd, buf1, buf2, tmp, False)
    for c in range(3):
        nrm[c] = Rb[c, face_axis]
    if _dot(nrm, d) > 0.0:
        for c in range(3):
            nrm[c] = -nrm[c]
    return _face_contacts(b, pb, Rb, hb, face_axis, nrm, a, pa, Ra, ha, margin,
                          k, maxc, ci, cj, cn, cp, cd, buf1, buf2, tmp, True)


@njit(cache=True)
def collide(pos, R, half, margin, ci, cj, cn, cp, cd, buf1, buf2, tmp):
    """Fill the contact arrays; returns the number of contacts."""
    n = pos.shape[0]
    maxc = ci.shape[0]
    k = 0
    up = np.array([0.0, 0.0, 1.0])
    p = np.empty(3)
    for b in range(n):
        for corner in range(8):
            sx = 1.0 if corner & 1 else -1.0
            sy = 1.0 if corner & 2 else -1.0
            sz = 1.0 if corner & 4 else -1.0
            for c in range(3):
                p[c] = (pos[b, c] + sx * half[b, 0] * R[b, c, 0] + sy * half[b, 1] * R[b, c, 1]
                        + sz * half[b, 2] * R[b, c, 2])
            if p[2] < margin:
                k = _push(k, maxc, ci, cj, cn, cp, cd, -1, b, up, p, -p[2])
    for a in range(n):
        for b in range(a + 1, n):
            reach = (np.sqrt(_dot(half[a], half[a])) + np.sqrt(_dot(half[b], half[b])) + margin)
            dx = pos[b, 0] - pos[a, 0]
            dy = pos[b, 1] - pos[a, 1]
            dz = pos[b, 2] - pos[a, 2]
            if dx * dx + dy * dy + dz * dz > reach * reach:
                continue
            k = _box_box(a, b, pos, R, half, margin, k, maxc, ci, cj, cn, cp, cd, buf1, buf2, tmp)
    return k


@njit(cache=True)
def _inv_inertia_world(R, inv_ib, out):
    n = R.shape[0]
    for b in range(n):
        for r in range(3):
            for c in range(3):
                s = 0.0
                for m in range(3):
                    s += R[b, r, m] * inv_ib[b, m] * R[b, c, m]
                out[b, r, c] = s


@njit(cache=True)
def _tangents(n, t1, t2):
    if abs(n[0]) > 0.57735:
        inv = 1.0 / np.sqrt(n[0] * n[0] + n[1] * n[1])
        t1[0] = n[1] * inv
        t1[1] = -n[0] * inv
        t1[2] = 0.0
    else:
        inv = 1.0 / np.sqrt(n[1] * n[1] + n[2] * n[2])
        t1[0] = 0.0
        t1[1] = n[2] * inv
        t1[2] = -n[1] * inv
    _cross(n, t1, t2)


@njit(cache=True)
def step(pos, quat, v, w, half, invm, inv_ib, R, Iinv,
         ci, cj, cn, cp, cd, lam, prev_key, prev_lam, nprev,
         dt, gravity, mu, restitution, margin, slop, beta, vel_iters, pos_iters,
         buf1, buf2, tmp):
    """Advance one time step in place; returns ``(status, n_contacts)``."""
    nb = pos.shape[0]
    for b in range(nb):
        quat_to_mat(quat[b], R[b])
    _inv_inertia_world(R, inv_ib, Iinv)
    nc = collide(pos, R, half, margin, ci, cj, cn, cp, cd, buf1, buf2, tmp)

    for b in range(nb):
        v[b, 2] -= gravity * dt

    # Jacobian rows per contact: k = 0 normal, 1 and 2 tangents
    D = np.zeros((nc, 3, 3))
    Ai = np.zeros((nc, 3, 3))
    Aj = np.zeros((nc, 3, 3))
    Mi = np.zeros((nc, 3, 3))
    Mj = np.zeros((nc, 3, 3))
    K = np.zeros((nc, 3))
    target = np.zeros(nc)
    key = np.zeros((nc, 5))
    ri = np.empty(3)
    rj = np.empty(3)
    t1 = np.empty(3)
    t2 = np.empty(3)
    for c in range(nc):
        i = ci[c]
        j = cj[c]
        for a in range(3):
            ri[a] = cp[c, a] - pos[i, a] if i >= 0 else 0.0
            rj[a] = cp[c, a] - pos[j, a]
        _tangents(cn[c], t1, t2)
        for a in range(3):
            D[c, 0, a] = cn[c, a]
            D[c, 1, a] = t1[a]
            D[c, 2, a] = t2[a]
        for k in range(3):
            _cross(ri, D[c, k], Ai[c, k])
            _cross(rj, D[c, k], Aj[c, k])
            eff = 0.0
            if i >= 0:
                eff += invm[i]
                for r in range(3):
                    Mi[c, k, r] = (Iinv[i, r, 0] * Ai[c, k, 0] + Iinv[i, r, 1] * Ai[c, k, 1]
                                   + Iinv[i, r, 2] * Ai[c, k, 2])
                eff += _dot(Ai[c, k], Mi[c, k])
            if j >= 0:
                eff += invm[j]
                for r in range(3):
                    Mj[c, k, r] = (Iinv[j, r, 0] * Aj[c, k, 0] + Iinv[j, r, 1] * Aj[c, k, 1]
                                   + Iinv[j, r, 2] * Aj[c, k, 2])
                eff += _dot(Aj[c, k], Mj[c, k])
            K[c, k] = 1.0 / eff
        vn = 0.0
        if j >= 0:
            for a in range(3):
                vn += D[c, 0, a] * v[j, a] + Aj[c, 0, a] * w[j, a]
        if i >= 0:
            for a in range(3):
                vn -= D[c, 0, a] * v[i, a] + Ai[c, 0, a] * w[i, a]
        bounce = 0.0
        if restitution > 0.0 and vn < -1.0:
            bounce = -restitution * vn
        # speculative contact: a gap may close during this step
        gap = -cd[c] if cd[c] < 0.0 else 0.0
        target[c] = bounce - gap / dt
        # warm start key: pair and contact point in j's body frame
        key[c, 0] = i
        key[c, 1] = j
        for a in range(3):
            key[c, 2 + a] = R[j, 0, a] * rj[0] + R[j, 1, a] * rj[1] + R[j, 2, a] * rj[2]
        lam[c, 0] = 0.0
        lam[c, 1] = 0.0
        lam[c, 2] = 0.0
        bestd = 0.05 * 0.05
        for p in range(nprev):
            if prev_key[p, 0] != i or prev_key[p, 1] != j:
                continue
            d2 = 0.0
            for a in range(3):
                d2 += (prev_key[p, 2 + a] - key[c, 2 + a]) ** 2
            if d2 < bestd:
                bestd = d2
                lam[c, 0] = prev_lam[p, 0]
        # only the normal impulse is carried over: warm-started friction keeps
        # re-injecting stale tangential pushes into resting stacks
        dl = lam[c, 0]
        if dl > 0.0:
            if j >= 0:
                for a in range(3):
                    v[j, a] += invm[j] * dl * D[c, 0, a]
                    w[j, a] += dl * Mj[c, 0, a]
            if i >= 0:
                for a in range(3):
                    v[i, a] -= invm[i] * dl * D[c, 0, a]
                    w[i, a] -= dl * Mi[c, 0, a]

    # top-down sweep: a resting stack's weight reaches the ground in one pass.
    # The row updates are written out inline; numba call overhead on array
    # arguments dominates otherwise.
    order = np.argsort(-cp[:nc, 2], kind="mergesort")
    for _it in range(vel_iters):
        # normals first, then friction bounded by the fresh normal impulses
        for c in order:
            i = ci[c]
            j = cj[c]
            s0 = 0.0
            if j >= 0:
                for a in range(3):
                    s0 += D[c, 0, a] * v[j, a] + Aj[c, 0, a] * w[j, a]
            if i >= 0:
                for a in range(3):
                    s0 -= D[c, 0, a] * v[i, a] + Ai[c, 0, a] * w[i, a]
            old = lam[c, 0]
            new = max(old + (target[c] - s0) * K[c, 0], 0.0)
            lam[c, 0] = new
            dl = new - old
            if j >= 0:
                for a in range(3):
                    v[j, a] += invm[j] * dl * D[c, 0, a]
                    w[j, a] += dl * Mj[c, 0, a]
            if i >= 0:
                for a in range(3):
                    v[i, a] -= invm[i] * dl * D[c, 0, a]
                    w[i, a] -= dl * Mi[c, 0, a]
        for c in order:
            i = ci[c]
            j = cj[c]
            s1 = 0.0
            if j >= 0:
                for a in range(3):
                    s1 += D[c, 1, a] * v[j, a] + Aj[c, 1, a] * w[j, a]
            if i >= 0:
                for a in range(3):
                    s1 -= D[c, 1, a] * v[i, a] + Ai[c, 1, a] * w[i, a]
            s2 = 0.0
            if j >= 0:
                for a in range(3):
                    s2 += D[c, 2, a] * v[j, a] + Aj[c, 2, a] * w[j, a]
            if i >= 0:
                for a in range(3):
                    s2 -= D[c, 2, a] * v[i, a] + Ai[c, 2, a] * w[i, a]
            o1 = lam[c, 1]
            o2 = lam[c, 2]
            n1 = o1 - s1 * K[c, 1]
            n2 = o2 - s2 * K[c, 2]
            lim = mu * lam[c, 0]
            mag = np.sqrt(n1 * n1 + n2 * n2)
            if mag > lim and mag > 0.0:
                n1 *= lim / mag
                n2 *= lim / mag
            lam[c, 1] = n1
            lam[c, 2] = n2
            d1 = n1 - o1
            d2 = n2 - o2
            if j >= 0:
                for a in range(3):
                    v[j, a] += invm[j] * d1 * D[c, 1, a]
                    w[j, a] += d1 * Mj[c, 1, a]
            if i >= 0:
                for a in range(3):
                    v[i, a] -= invm[i] * d1 * D[c, 1, a]
                    w[i, a] -= d1 * Mi[c, 1, a]
            if j >= 0:
                for a in range(3):
                    v[j, a] += invm[j] * d2 * D[c, 2, a]
                    w[j, a] += d2 * Mj[c, 2, a]
            if i >= 0:
                for a in range(3):
                    v[i, a] -= invm[i] * d2 * D[c, 2, a]
                    w[i, a] -= d2 * Mi[c, 2, a]

    # split-impulse penetration recovery on pseudo velocities
    vp = np.zeros((nb, 3))
    wp = np.zeros((nb, 3))
    lp = np.zeros(nc)
    for _it in range(pos_iters):
        for c in order:
            err = cd[c] - slop
            if err <= 0.0:
                continue
            i = ci[c]
            j = cj[c]
            s0 = 0.0
            if j >= 0:
                for a in range(3):
                    s0 += D[c, 0, a] * vp[j, a] + Aj[c, 0, a] * wp[j, a]
            if i >= 0:
                for a in range(3):
                    s0 -= D[c, 0, a] * vp[i, a] + Ai[c, 0, a] * wp[i, a]
            old = lp[c]
            new = max(old + (beta * err / dt - s0) * K[c, 0], 0.0)
            lp[c] = new
            dl = new - old
            if j >= 0:
                for a in range(3):
                    vp[j, a] += invm[j] * dl * D[c, 0, a]
                    wp[j, a] += dl * Mj[c, 0, a]
            if i >= 0:
                for a in range(3):
                    vp[i, a] -= invm[i] * dl * D[c, 0, a]
                    wp[i, a] -= dl * Mi[c, 0, a]

    for c in range(nc):
        for a in range(5):
            prev_key[c, a] = key[c, a]
        for a in range(3):
            prev_lam[c, a] = lam[c, a]

    status = OK
    for b in range(nb):
        for a in range(3):
            pos[b, a] += (v[b, a] + vp[b, a]) * dt
        wx = w[b, 0] + wp[b, 0]
        wy = w[b, 1] + wp[b, 1]
        wz = w[b, 2] + wp[b, 2]
        qw, qx, qy, qz = quat[b, 0], quat[b, 1], quat[b, 2], quat[b, 3]
        h = 0.5 * dt
        quat[b, 0] = qw + h * (-wx * qx - wy * qy - wz * qz)
        quat[b, 1] = qx + h * (wx * qw + wy * qz - wz * qy)
        quat[b, 2] = qy + h * (wy * qw + wz * qx - wx * qz)
        quat[b, 3] = qz + h * (wz * qw + wx * qy - wy * qx)
        qn = np.sqrt(quat[b, 0] ** 2 + quat[b, 1] ** 2 + quat[b, 2] ** 2 + quat[b, 3] ** 2)
        if not np.isfinite(qn) or qn == 0.0:
            status = BLOWUP
            continue
        for a in range(4):
            quat[b, a] /= qn
        for a in range(3):
            if not (np.isfinite(pos[b, a]) and np.isfinite(v[b, a]) and np.isfinite(w[b, a])):
                status = BLOWUP
    return status, nc


@njit(cache=True)
def run(pos, quat, v, w, half, invm, inv_ib, dt, gravity, mu, restitution, margin, slop, beta,
        vel_iters, pos_iters, max_steps, settle_lin, settle_ang, settle_steps, trace):
    """Integrate until settled or ``max_steps``.

    Returns ``(status, steps_taken)``; on blow-up ``steps_taken`` is the
    failing step index.  ``trace`` (``(max_steps + 1, n, 13)`` or empty)
    receives position, quaternion, linear and angular velocity per step.
    """
    nb = pos.shape[0]
    maxc = 4 * 8 * nb + MAX_PER_PAIR * nb * (nb - 1) // 2 + 8
    ci = np.zeros(maxc, dtype=np.int64)
    cj = np.zeros(maxc, dtype=np.int64)
    cn = np.zeros((maxc, 3))
    cp = np.zeros((maxc, 3))
    cd = np.zeros(maxc)
    lam = np.zeros((maxc, 3))
    prev_key = np.zeros((maxc, 5))
    prev_lam = np.zeros((maxc, 3))
    R = np.zeros((nb, 3, 3))
    Iinv = np.zeros((nb, 3, 3))
    buf1 = np.zeros((16, 3))
    buf2 = np.zeros((16, 3))
    tmp = np.zeros(3)
    tracing = trace.shape[0] > 0
    if tracing:
        _record(trace, 0, pos, quat, v, w)
    nprev = 0
    calm = 0
    for s in range(1, max_steps + 1):
        status, nc = step(pos, quat, v, w, half, invm, inv_ib, R, Iinv,
                          ci, cj, cn, cp, cd, lam, prev_key, prev_lam, nprev,
                          dt, gravity, mu, restitution, margin, slop, beta, vel_iters, pos_iters,
                          buf1, buf2, tmp)
        nprev = nc
        if status != OK:
            return status, s
        if tracing:
            _record(trace, s, pos, quat, v, w)
        vmax = 0.0
        wmax = 0.0
        for b in range(nb):
            vmax = max(vmax, np.sqrt(v[b, 0] ** 2 + v[b, 1] ** 2 + v[b, 2] ** 2))
            wmax = max(wmax, np.sqrt(w[b, 0] ** 2 + w[b, 1] ** 2 + w[b, 2] ** 2))
        if vmax < settle_lin and wmax < settle_ang:
            calm += 1
            if calm >= settle_steps:
                return OK, s
        else:
            calm = 0
    return OK, max_steps


@njit(cache=True)
def _record(trace, s, pos, quat, v, w):
    for b in range(pos.shape[0]):
        for a in range(3):
            trace[s, b, a] = pos[b, a]
            trace[s, b, 7 + a] = v[b, a]
            trace[s, b, 10 + a] = w[b, a]
        for a in range(4):
            trace[s, b, 3 + a] = quat[b, a]
