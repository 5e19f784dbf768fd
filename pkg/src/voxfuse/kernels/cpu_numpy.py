"""Pure-numpy implementations of the hot kernels.

This is the fallback backend (``VOXFUSE_KERNELS=numpy``); every function here
has a loop-style twin in :mod:`voxfuse.kernels.cpu_numba` with the same
signature and semantics. Keep the two in sync.
"""

import numpy as np

# Primitive type codes shared with the numba backend and the scene encoder.
PRIM_SPHERE = 0
PRIM_CAPSULE = 1
PRIM_BOX = 2

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def bilinear_sample(img, qx, qy):
    """Sample `img` at continuous coordinates (qx, qy), pixel centers at integers.

    Returns (values, valid); valid is False where the sample point leaves
    [0, W-1] x [0, H-1]. Values outside are clamped-sampled (caller masks).
    """
    h, w = img.shape
    valid = (qx >= 0.0) & (qx <= w - 1.0) & (qy >= 0.0) & (qy <= h - 1.0)
    x = np.clip(qx, 0.0, w - 1.0)
    y = np.clip(qy, 0.0, h - 1.0)
    x0 = np.clip(np.floor(x).astype(np.int64), 0, max(w - 2, 0))
    y0 = np.clip(np.floor(y).astype(np.int64), 0, max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    tx = x - x0
    ty = y - y0
    v00 = img[y0, x0]
    v01 = img[y0, x1]
    v10 = img[y1, x0]
    v11 = img[y1, x1]
    top = v00 + tx * (v01 - v00)
    bot = v10 + tx * (v11 - v10)
    return top + ty * (bot - top), valid


def _box_sum(a, r):
    """Sum of a over (2r+1)^2 windows; returns the interior-valid array.

    Output has the full input shape; entries whose window leaves the image
    are garbage and must be masked by the caller (border handling).
    """
    h, w = a.shape
    k = 2 * r + 1
    s = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(a, axis=0, out=s[1:, 1:])
    np.cumsum(s[1:, 1:], axis=1, out=s[1:, 1:])
    out = np.zeros((h, w), dtype=np.float64)
    if h >= k and w >= k:
        out[r:h - r, r:w - r] = (
            s[k:, k:] - s[:-k, k:] - s[k:, :-k] + s[:-k, :-k]
        )
    return out


def window_ncc(ref, warped, valid, window, eps_var):
    """Windowed zero-mean NCC per pixel.

    Windows touching an invalid pixel or the image border, or whose variance
    in either signal is below eps_var, yield 0. Returns (ncc, window_valid)
    where window_valid marks fully-valid interior windows.
    """
    h, w = ref.shape
    r = window // 2
    n = float((2 * r + 1) ** 2)
    vf = valid.astype(np.float64)
    cnt = _box_sum(vf, r)
    a = np.where(valid, ref, 0.0)
    b = np.where(valid, warped, 0.0)
    sa = _box_sum(a, r)
    sb = _box_sum(b, r)
    saa = _box_sum(a * a, r)
    sbb = _box_sum(b * b, r)
    sab = _box_sum(a * b, r)

    wvalid = np.zeros((h, w), dtype=bool)
    if h >= 2 * r + 1 and w >= 2 * r + 1:
        wvalid[r:h - r, r:w - r] = cnt[r:h - r, r:w - r] == n

    va = n * saa - sa * sa
    vb = n * sbb - sb * sb
    cov = n * sab - sa * sb
    good = wvalid & (va > eps_var * n * n) & (vb > eps_var * n * n)
    ncc = np.zeros((h, w), dtype=np.float64)
    denom = np.sqrt(np.where(good, va * vb, 1.0))
    ncc[good] = (cov / denom)[good]
    np.clip(ncc, -1.0, 1.0, out=ncc)
    return ncc, wvalid


def scene_sdf(points, prims, smooth_k):
    """Signed distance of the primitive composition at points (N, 3)."""
    pts = np.atleast_2d(points)
    n = pts.shape[0]
    p = prims.shape[0]
    d = np.empty((p, n), dtype=np.float64)
    for j in range(p):
        code = int(prims[j, 0])
        if code == PRIM_SPHERE:
            c = prims[j, 1:4]
            d[j] = np.linalg.norm(pts - c, axis=1) - prims[j, 4]
        elif code == PRIM_CAPSULE:
            a = prims[j, 1:4]
            b = prims[j, 4:7]
            ba = b - a
            pa = pts - a
            t = np.clip(pa @ ba / (ba @ ba), 0.0, 1.0)
            d[j] = np.linalg.norm(pa - t[:, None] * ba, axis=1) - prims[j, 7]
        else:  # PRIM_BOX
            c = prims[j, 1:4]
            hext = prims[j, 4:7]
            q = np.abs(pts - c) - hext
            outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
            inside = np.minimum(np.max(q, axis=1), 0.0)
            d[j] = outside + inside
    if p == 1 or smooth_k <= 0.0:
        out = d.min(axis=0)
    else:
        m = d.min(axis=0)
        out = m - np.log(np.sum(np.exp(-smooth_k * (d - m)), axis=0)) / smooth_k
    return out if points.ndim > 1 else out[0]


def raycast(origins, dirs, prims, smooth_k, t_max, tol, max_steps):
    """Sphere-trace rays; returns hit distances, NaN on miss."""
    n = origins.shape[0]
    t = np.zeros(n, dtype=np.float64)
    out = np.full(n, np.nan)
    active = np.arange(n)
    for _ in range(max_steps):
        if active.size == 0:
            break
        p = origins[active] + t[active, None] * dirs[active]
        d = scene_sdf(p, prims, smooth_k)
        hit = np.abs(d) < tol
        out[active[hit]] = t[active[hit]]
        adv = active[~hit]
        t[adv] += d[~hit]
        active = adv[(t[adv] < t_max) & (t[adv] >= 0.0)]
    return out


def _hash_u64(x):
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(33)
    x *= np.uint64(0xFF51AFD7ED558CCD)
    x ^= x >> np.uint64(33)
    x *= np.uint64(0xC4CEB9FE1A85EC53)
    x ^= x >> np.uint64(33)
    return x


def _lattice_value(ix, iy, iz, seed):
    h = (
        ix.astype(np.uint64) * np.uint64(0x9E3779B185EBCA87)
        ^ iy.astype(np.uint64) * np.uint64(0xC2B2AE3D27D4EB4F)
        ^ iz.astype(np.uint64) * np.uint64(0x165667B19E3779F9)
        ^ np.uint64(seed)
    )
    return (_hash_u64(h) >> np.uint64(11)).astype(np.float64) * _INV_2_53


def _value_noise(pts, seed):
    ix = np.floor(pts).astype(np.int64)
    f = pts - ix
    u = f * f * (3.0 - 2.0 * f)
    ix0, iy0, iz0 = ix[:, 0], ix[:, 1], ix[:, 2]
    ux, uy, uz = u[:, 0], u[:, 1], u[:, 2]

    def lv(dx, dy, dz):
        return _lattice_value(ix0 + dx, iy0 + dy, iz0 + dz, seed)

    c00 = lv(0, 0, 0) + ux * (lv(1, 0, 0) - lv(0, 0, 0))
    c10 = lv(0, 1, 0) + ux * (lv(1, 1, 0) - lv(0, 1, 0))
    c01 = lv(0, 0, 1) + ux * (lv(1, 0, 1) - lv(0, 0, 1))
    c11 = lv(0, 1, 1) + ux * (lv(1, 1, 1) - lv(0, 1, 1))
    c0 = c00 + uy * (c10 - c00)
    c1 = c01 + uy * (c11 - c01)
    return c0 + uz * (c1 - c0)


def texture_eval(points, frequency, octaves, seed, checker_mix):
    """Procedural scalar texture in [0, 1]: value-noise octaves + checker mix."""
    pts = np.atleast_2d(points).astype(np.float64)
    total = np.zeros(pts.shape[0], dtype=np.float64)
    amp = 1.0
    amp_sum = 0.0
    freq = frequency
    for o in range(octaves):
        total += amp * _value_noise(pts * freq, np.uint64(seed + 131 * o))
        amp_sum += amp
        amp *= 0.5
        freq *= 2.0
    noise = total / amp_sum
    cf = frequency * 0.5
    ic = np.floor(pts * cf).astype(np.int64)
    checker = ((ic[:, 0] + ic[:, 1] + ic[:, 2]) & 1).astype(np.float64)
    out = (1.0 - checker_mix) * noise + checker_mix * checker
    return out if points.ndim > 1 else out[0]


def tsdf_update(tsdf_sum, weight, origin, voxel_size, rot, trans,
                fx, fy, cx, cy, depth, valid, truncation):
    """Integrate one depth map into the (sum, weight) accumulators, in place."""
    nx, ny, nz = tsdf_sum.shape
    h, w = depth.shape
    ys = origin[1] + voxel_size * np.arange(ny)
    zs = origin[2] + voxel_size * np.arange(nz)
    yy, zz = np.meshgrid(ys, zs, indexing="ij")
    for i in range(nx):
        x = origin[0] + voxel_size * i
        pcx = rot[0, 0] * x + rot[0, 1] * yy + rot[0, 2] * zz + trans[0]
        pcy = rot[1, 0] * x + rot[1, 1] * yy + rot[1, 2] * zz + trans[1]
        pcz = rot[2, 0] * x + rot[2, 1] * yy + rot[2, 2] * zz + trans[2]
        front = pcz > 0.0
        if not front.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            u = fx * pcx / pcz + cx
            v = fy * pcy / pcz + cy
        iu = np.rint(u).astype(np.int64)
        iv = np.rint(v).astype(np.int64)
        ok = front & (iu >= 0) & (iu < w) & (iv >= 0) & (iv < h)
        iu = np.clip(iu, 0, w - 1)
        iv = np.clip(iv, 0, h - 1)
        ok &= valid[iv, iu]
        d = depth[iv, iu]
        ok &= d > 0.0
        s = d - pcz
        ok &= s >= -truncation
        f = np.clip(s / truncation, -1.0, 1.0)
        tsdf_sum[i][ok] += f[ok]
        weight[i][ok] += 1.0


def rasterize(tris, width, height):
    """Coverage rasterization of 2D triangles with a top-left fill rule.

    tris: (T, 3, 2) float64 pixel coordinates, pixel centers at integers.
    A boundary pixel passes an edge when the edge "owns" it: for triangles
    normalized to positive shoelace area, edges with dy < 0, or dy == 0 and
    dx > 0, include their boundary.
    """
    mask = np.zeros((height, width), dtype=bool)
    for t in range(tris.shape[0]):
        ax, ay = tris[t, 0]
        bx, by = tris[t, 1]
        cx_, cy_ = tris[t, 2]
        area2 = (bx - ax) * (cy_ - ay) - (by - ay) * (cx_ - ax)
        if area2 == 0.0:
            continue
        if area2 < 0.0:
            bx, by, cx_, cy_ = cx_, cy_, bx, by
        x0 = max(int(np.ceil(min(ax, bx, cx_))), 0)
        x1 = min(int(np.floor(max(ax, bx, cx_))), width - 1)
        y0 = max(int(np.ceil(min(ay, by, cy_))), 0)
        y1 = min(int(np.floor(max(ay, by, cy_))), height - 1)
        if x0 > x1 or y0 > y1:
            continue
        px, py = np.meshgrid(
            np.arange(x0, x1 + 1, dtype=np.float64),
            np.arange(y0, y1 + 1, dtype=np.float64),
        )
        inside = np.ones(px.shape, dtype=bool)
        for (ex0, ey0, ex1, ey1) in (
            (ax, ay, bx, by),
            (bx, by, cx_, cy_),
            (cx_, cy_, ax, ay),
        ):
            dx = ex1 - ex0
            dy = ey1 - ey0
            e = dx * (py - ey0) - dy * (px - ex0)
            own = (dy < 0.0) or (dy == 0.0 and dx > 0.0)
            inside &= (e > 0.0) | ((e == 0.0) if own else False)
        mask[y0:y1 + 1, x0:x1 + 1] |= inside
    return mask
