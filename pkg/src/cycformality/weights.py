"""Numerical graph weights on configuration spaces of the disk.

Chart: the first interior point is pinned at ``anchor`` (0 by default) and
the boundary point ``b0`` at 1.  The free coordinates are, in this order,

    x_2, y_2, ..., x_m, y_m, phi_1, ..., phi_n

with ``z_k = x_k + i y_k`` and ``b_k = exp(2 pi i phi_k)``,
``0 < phi_1 < ... < phi_n < 1``.  The weight is the integral of the density
``omega(d/dx_2, d/dy_2, ..., d/dphi_n)`` against Lebesgue measure in these
coordinates, times the orientation sign :func:`orientation_sign`.

The configuration space is oriented by ``i_t i_s i_h Omega`` with
``Omega = dx_1 dy_1 ... dx_m dy_m dphi_0 dphi_n ... dphi_1`` and ``h, s, t``
the rotation, half-plane scaling and half-plane translation generators.  On
the chart this comes out as ``-(-1)^(n(n-1)/2)`` times the coordinate
orientation for every ``m``.  The quadratic weight relations and the
L-infinity relation instead require an extra factor ``(-1)^(n-1)``; we use
``(-1)^((n-1)(n+2)/2)``, which also gives the single-edge graph ``1 1 | b1``
weight +1.

Integration is randomized quasi Monte Carlo: several independently scrambled
Sobol sequences (``scipy.stats.qmc``) whose means give the value and whose
spread gives the standard error.
"""

from __future__ import annotations

import hashlib
import math
import os
import threading
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np
from scipy.stats import qmc

from .graphs import ExtGraph, B

TWO_PI = 2 * np.pi
REPLICATES = 16
CHUNK = 1 << 14
CACHE_ENV = "CYCFORMALITY_CACHE"


def theta(z, w, x):
    """Hyperbolic angle at ``z`` from the geodesic to ``x`` to the one to ``w``, in turns."""
    z, w, x = np.asarray(z, complex), np.asarray(w, complex), np.asarray(x, complex)
    if np.any(w == z) or np.any(x == z):
        raise ValueError("theta: coincident points")
    F = (w - z) * (1 - np.conj(z) * x) / ((1 - np.conj(z) * w) * (x - z))
    return np.mod(np.angle(F) / TWO_PI, 1.0)


class ConfigChart:
    """Gauge-fixed chart of the configuration space of ``m`` interior and ``n+1`` boundary points."""

    def __init__(self, m: int, n: int, anchor=0j, spectator=None):
        if m < 1:
            raise ValueError("charts need at least one interior point")
        if abs(anchor) >= 1:
            raise ValueError("anchor must lie inside the disk")
        if spectator is not None and not 1 <= spectator <= n:
            raise ValueError("spectator must be a boundary vertex other than b0")
        self.m, self.n, self.anchor = m, n, complex(anchor)
        self.spectator = spectator
        self.dim = 2 * (m - 1) + n

    def col_interior(self, k):
        return 2 * (k - 1)

    def col_boundary(self, k):
        return 2 * (self.m - 1) + k - 1

    def config(self, coords):
        coords = np.atleast_2d(np.asarray(coords, float))
        N = coords.shape[0]
        z = np.empty((N, self.m), complex)
        z[:, 0] = self.anchor
        for k in range(1, self.m):
            c = self.col_interior(k)
            z[:, k] = coords[:, c] + 1j * coords[:, c + 1]
        zb = np.empty((N, self.n + 1), complex)
        zb[:, 0] = 1.0
        for k in range(1, self.n + 1):
            zb[:, k] = np.exp(TWO_PI * 1j * coords[:, self.col_boundary(k)])
        return Config(self, z, zb, self.spectator)

    @property
    def sample_dim(self):
        return 3 * (self.m - 1) + self.n

    def centers(self, z, zb, k):
        """Proposal centres for interior point ``k``: earlier interior points and all boundary points."""
        return [z[:, t] for t in range(k)] + [zb[:, t] for t in range(self.n + 1)]

    def from_unit_cube(self, u):
        """Map points of ``[0,1]^sample_dim`` to chart coordinates.

        Returns ``(coords, invq)`` where ``invq`` is the reciprocal proposal
        density.  Each interior point is drawn from an equal mixture of polar
        proposals centred at the earlier interior points and at the boundary
        points (radius uniform up to the circle); this flattens the ``1/r``
        collision singularities of the angle forms.  Boundary angles are
        sorted uniforms.
        """
        u = np.atleast_2d(u)
        N = u.shape[0]
        coords = np.empty((N, self.dim))
        invq = np.ones(N)
        z = np.empty((N, self.m), complex)
        z[:, 0] = self.anchor
        zb = np.empty((N, self.n + 1), complex)
        zb[:, 0] = 1.0
        if self.n:
            c0 = 3 * (self.m - 1)
            phis = np.sort(u[:, c0:c0 + self.n], axis=1)
            coords[:, self.col_boundary(1):] = phis
            zb[:, 1:] = np.exp(TWO_PI * 1j * phis)
            invq /= math.factorial(self.n)
        for k in range(1, self.m):
            cs = self.centers(z, zb, k)
            nc = len(cs)
            sel = np.minimum((u[:, 3 * (k - 1)] * nc).astype(int), nc - 1)
            centre = np.choose(sel, cs)
            boundary = sel >= k
            uu, ur = u[:, 3 * (k - 1) + 1], u[:, 3 * (k - 1) + 2]
            psi = np.where(boundary, np.angle(centre) + np.pi / 2 + np.pi * uu, TWO_PI * uu)
            e = np.exp(1j * psi)
            r = ur * _reach(centre, e)
            pt = centre + r * e
            z[:, k] = pt
            c = self.col_interior(k)
            coords[:, c], coords[:, c + 1] = pt.real, pt.imag
            q = np.zeros(N)
            for t, cc in enumerate(cs):
                q += _polar_density(cc, pt, t >= k)
            invq *= nc / q
        return coords, invq


def _reach(c, e):
    """Distance from ``c`` to the unit circle along direction ``e``."""
    p = (np.conj(c) * e).real
    return np.maximum(-p + np.sqrt(np.maximum(p * p + 1 - np.abs(c) ** 2, 0.0)), 0.0)


def _polar_density(c, z, boundary):
    d = z - c
    r = np.abs(d)
    with np.errstate(all="ignore"):
        e = d / r
        dens = 1.0 / ((np.pi if boundary else TWO_PI) * r * _reach(c, e))
    return np.where(np.isfinite(dens), dens, 0.0)


class Config:
    """A batch of configurations with vectorized angle forms."""

    def __init__(self, chart, z, zb, spectator=None):
        self.chart, self.z, self.zb = chart, z, zb
        self.N = z.shape[0]
        # boundary points seen by eta and varpi, in cyclic order from b0
        self.ring = [B(i) for i in range(chart.n + 1) if i != spectator]

    def point(self, v):
        kind, k = v
        return self.z[:, k] if kind == "i" else self.zb[:, k]

    def theta(self, zv, wv, xv):
        return theta(self.point(zv), self.point(wv), self.point(xv))

    def _add_holo(self, cov, v, C):
        """Add ``Im(C dv) / 2 pi`` for a holomorphic dependence on point ``v``."""
        kind, k = v
        ch = self.chart
        if kind == "i":
            if k == 0:
                return
            c = ch.col_interior(k)
            cov[:, c] += C.imag
            cov[:, c + 1] += C.real
        else:
            if k == 0:
                return
            cov[:, ch.col_boundary(k)] += (C * TWO_PI * 1j * self.zb[:, k]).imag

    def dtheta(self, zv, wv, xv):
        """Covector of ``d theta(z, w, x)`` in chart coordinates, shape ``(N, dim)``."""
        cov = np.zeros((self.N, self.chart.dim))
        if wv == xv:
            return cov
        z, w, x = self.point(zv), self.point(wv), self.point(xv)
        zc = np.conj(z)
        Cz = -1 / (w - z) + 1 / (x - z)
        Czb = -x / (1 - zc * x) + w / (1 - zc * w)
        Cw = 1 / (w - z) + zc / (1 - zc * w)
        Cx = -zc / (1 - zc * x) - 1 / (x - z)
        kind, k = zv
        if kind != "i":
            raise ValueError("the vertex of an angle must be an interior point")
        if k != 0:
            c = self.chart.col_interior(k)
            cov[:, c] += (Cz + Czb).imag
            cov[:, c + 1] += (1j * (Cz - Czb)).imag
        self._add_holo(cov, wv, Cw)
        self._add_holo(cov, xv, Cx)
        cov /= TWO_PI
        return cov

    def eta(self, k):
        """``eta_{z_k}`` as a list of ``(prefactor, covector)``; the term with ``d theta(z, b0, b0)`` is dropped."""
        ring, zv = self.ring, ("i", k)
        out = []
        for i in range(1, len(ring)):
            nxt = ring[(i + 1) % len(ring)]
            out.append((self.theta(zv, nxt, ring[i]), self.dtheta(zv, ring[i], B(0))))
        return out

    def varpi(self, k):
        """``varpi_{z_k}`` as a list of wedge pairs ``(covector, covector)``."""
        ring, zv = self.ring, ("i", k)
        return [(self.dtheta(zv, ring[i], B(0)), self.dtheta(zv, ring[(i + 1) % len(ring)], ring[i]))
                for i in range(1, len(ring))]


# -- form assembly

def orientation_sign(n):
    """Orientation of ``C_{m,n}`` relative to the chart coordinate order.

    Equals +1 for the single edge graph and is independent of ``m``.  It
    also fixes the sign of the point chart ``(m, n) = (1, 0)`` to -1.
    """
    return -1 if ((n - 1) * (n + 2) // 2) % 2 else 1


def form_degree(g: ExtGraph, upows):
    return g.num_edges + 2 * sum(upows)


def chart_dim(g: ExtGraph):
    return 2 * g.m + g.n - 2


def _spectator(g, upows, spectator):
    # a spectator only changes eta and varpi
    return spectator if (g.tadpoles() or any(upows)) else None


def zero_reason(g: ExtGraph, upows, spectator=None):
    """Why the weight vanishes without integration, or None."""
    upows = tuple(upows)
    spectator = _spectator(g, upows, spectator)
    if len(upows) != g.m:
        raise ValueError("one u-power per type I vertex")
    if form_degree(g, upows) != chart_dim(g):
        return "degree mismatch"
    if any(t == B(0) for s in g.stars for t in s):
        return "edge to b0"
    if g.n - (spectator is not None) == 0 and (g.tadpoles() or any(upows)):
        return "eta and varpi vanish without boundary points besides b0"
    return None


def exact_weight(g: ExtGraph, upows, spectator=None):
    """Weights known without sampling: zero shortcuts and 0-dimensional charts."""
    if g.m == 0:
        return 1.0 if (g.n == 2 and not upows) else 0.0
    if zero_reason(g, upows, spectator):
        return 0.0
    if chart_dim(g) == 0:
        return float(orientation_sign(g.n))
    return None


def assemble_form(g: ExtGraph, upows, spectator=None):
    """Return ``density(config) -> (N,)`` for the top form ``omega_Gamma(j...)``.

    Factors are wedged in the order ``varpi^{j_1} ... varpi^{j_m}`` followed
    by the edge forms in star order; the multilinear expansion is carried out
    explicitly and each term is a determinant of stacked covectors.
    """
    upows = tuple(upows)
    reason = zero_reason(g, upows, spectator)
    if reason:
        raise ValueError(f"weight vanishes identically: {reason}")

    def density(cfg: Config):
        factors = []      # each factor: list of (prefactor or None, [covectors])
        for k, j in enumerate(upows):
            if j == 0:
                continue
            pairs = cfg.varpi(k)
            alts = []
            for combo in combinations(range(len(pairs)), j):
                covs = []
                for c in combo:
                    covs.extend(pairs[c])
                alts.append((float(math.factorial(j)), covs))
            factors.append(alts)
        for src, s in enumerate(g.stars):
            for t in s:
                if t == ("i", src):
                    factors.append([(p, [c]) for p, c in cfg.eta(src)])
                else:
                    factors.append([(None, [cfg.dtheta(("i", src), t, B(0))])])
        total = np.zeros(cfg.N)
        D = cfg.chart.dim
        for choice in product(*factors):
            pref = np.ones(cfg.N)
            rows = []
            for p, covs in choice:
                if p is not None:
                    pref = pref * p
                rows.extend(covs)
            if len(rows) != D:
                raise AssertionError("form degree does not match chart dimension")
            M = np.stack(rows, axis=1)
            total += pref * np.linalg.det(M)
        return total

    return density


# -- integration

@dataclass(frozen=True)
class Weight:
    value: float
    stderr: float
    samples: int
    seed: int
    incidents: int = 0

    def __str__(self):
        return f"{self.value:.6f} +- {self.stderr:.2g} ({self.samples} samples)"


def _seed_words(seed, key):
    h = hashlib.sha256(key.encode()).digest()
    words = [int.from_bytes(h[i:i + 4], "little") for i in range(0, 16, 4)]
    return [seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF] + words


def cache_key(g: ExtGraph, upows):
    return g.canon(), ",".join(str(j) for j in upows)


def integrate(g: ExtGraph, upows=None, samples=1 << 20, seed=0xC0FFEE, anchor=0j,
              cache=None, replicates=REPLICATES, spectator=None) -> Weight:
    """Integrate ``omega_Gamma(upows)`` over the chart.

    ``samples`` is rounded up to ``replicates * 2^k``.  The result depends only
    on ``(g, upows, samples, seed, anchor, spectator)``.  A ``spectator``
    boundary vertex receives edges but is left out of ``eta`` and ``varpi``.
    """
    upows = tuple(upows) if upows is not None else (0,) * g.m
    spectator = _spectator(g, upows, spectator)
    exact = exact_weight(g, upows, spectator)
    if exact is not None:
        return Weight(exact, 0.0, 0, seed)
    canon, ukey = cache_key(g, upows)
    if anchor != 0:
        ukey += f";anchor={anchor!r}"
    if spectator is not None:
        ukey += f";spectator={spectator}"
    per = max(1, samples // replicates)
    k = max(4, math.ceil(math.log2(per)))
    total = replicates * (1 << k)
    if cache is not None:
        hit = cache.lookup(canon, ukey, total, seed)
        if hit is not None:
            return hit
    chart = ConfigChart(g.m, g.n, anchor, spectator)
    density = assemble_form(g, upows, spectator)
    means = []
    incidents = 0
    for r in range(replicates):
        ss = np.random.SeedSequence(_seed_words(seed, canon + ";" + ukey) + [r])
        rng = np.random.default_rng(ss)
        sob = qmc.Sobol(chart.sample_dim, scramble=True, seed=rng)
        acc = 0.0
        left = 1 << k
        while left:
            cnt = min(CHUNK, left)
            u = sob.random(cnt)
            vals, bad = _evaluate(chart, density, u, rng)
            incidents += bad
            acc += float(np.sum(vals))
            left -= cnt
        means.append(acc / (1 << k))
    if incidents > 1e-3 * total:
        raise FloatingPointError(f"{incidents} non-finite samples for {canon}")
    means = np.array(means) * orientation_sign(g.n)
    w = Weight(float(means.mean()), float(means.std(ddof=1) / math.sqrt(replicates)), total, seed, incidents)
    if cache is not None:
        cache.store(canon, ukey, w)
    return w


def _evaluate(chart, density, u, rng):
    coords, jac = chart.from_unit_cube(u)
    with np.errstate(all="ignore"):
        vals = density(chart.config(coords)) * jac
    bad = ~np.isfinite(vals)
    nbad = int(bad.sum())
    tries = 0
    while bad.any():
        tries += 1
        if tries > 10:
            raise FloatingPointError("could not resample non-finite points")
        uu = np.clip(u[bad] + rng.uniform(-1e-9, 1e-9, u[bad].shape), 1e-12, 1 - 1e-12)
        c2, j2 = chart.from_unit_cube(uu)
        with np.errstate(all="ignore"):
            v2 = density(chart.config(c2)) * j2
        idx = np.flatnonzero(bad)
        vals[idx] = v2
        bad[idx] = ~np.isfinite(v2)
    return vals, nbad


class WeightCache:
    """Append-only text cache, one weight per line::

        <graph canon> ; upows=j1,j2 ; value ; stderr ; samples ; seed
    """

    def __init__(self, path=None):
        self.path = path
        self._lock = threading.Lock()
        self.entries = {}
        if path and os.path.exists(path):
            with open(path) as fh:
                for line in fh:
                    self._ingest(line)

    @classmethod
    def from_env(cls, default=None):
        return cls(os.environ.get(CACHE_ENV, default))

    def _ingest(self, line):
        parts = [p.strip() for p in line.rstrip("\n").split(" ; ")]
        if len(parts) < 6 or not parts[1].startswith("upows="):
            return
        canon, ukey = parts[0], parts[1][len("upows="):]
        extra = parts[2:-4]
        if extra:
            ukey = ";".join([ukey] + extra)
        w = Weight(float(parts[-4]), float(parts[-3]), int(parts[-2]), int(parts[-1]))
        self.entries.setdefault((canon, ukey), []).append(w)

    def lookup(self, canon, ukey, samples, seed):
        found = self.entries.get((canon, ukey))
        if not found:
            return None
        for w in found:
            if w.samples == samples and w.seed == seed:
                return w
        better = [w for w in found if w.samples >= samples]
        return max(better, key=lambda w: w.samples) if better else None

    def store(self, canon, ukey, w: Weight):
        fields = ukey.split(";")
        line = " ; ".join([canon, "upows=" + fields[0], *fields[1:],
                           repr(w.value), repr(w.stderr), str(w.samples), str(w.seed)])
        with self._lock:
            self.entries.setdefault((canon, ukey), []).append(w)
            if self.path:
                d = os.path.dirname(self.path)
                if d:
                    os.makedirs(d, exist_ok=True)
                with open(self.path, "a") as fh:
                    fh.write(line + "\n")
