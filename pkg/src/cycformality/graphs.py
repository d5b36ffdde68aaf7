"""Extended Kontsevich graphs and their polydifferential operators.

A graph in ``G_ex(m, n)`` has type I vertices ``0..m-1`` (printed 1-based as
``i1..im``) and type II vertices ``0..n`` (printed ``b0..bn``).  Every edge
leaves a type I vertex; ``stars[j]`` is the ordered tuple of targets of
vertex ``j``.  A target is ``("i", k)`` or ``("b", k)``; a tadpole is the
target ``("i", j)`` inside ``stars[j]``.

Text form, also used as the weight cache key::

    m n | <star 1> | <star 2> | ...

with ``-`` standing for an empty star, e.g. ``2 1 | i2 b1 | b0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations, product

from .algebra import Polynomial
from .hochschild import PolyDiffOp
from .tpoly import PolyVector, sort_sign


def I(k):
    return ("i", k)


def B(k):
    return ("b", k)


@dataclass(frozen=True)
class ExtGraph:
    m: int
    n: int
    stars: tuple

    def __post_init__(self):
        stars = tuple(tuple(tuple(t) for t in s) for s in self.stars)
        object.__setattr__(self, "stars", stars)
        if len(stars) != self.m:
            raise ValueError(f"expected {self.m} stars, got {len(stars)}")
        for j, s in enumerate(stars):
            if len(set(s)) != len(s):
                raise ValueError(f"double edge at vertex {j + 1}")
            for kind, k in s:
                if kind == "i" and not 0 <= k < self.m:
                    raise ValueError(f"type I target i{k + 1} out of range")
                if kind == "b" and not 0 <= k <= self.n:
                    raise ValueError(f"type II target b{k} out of range")
                if kind not in ("i", "b"):
                    raise ValueError(f"bad target kind {kind!r}")

    # -- derived data
    @property
    def outdegrees(self):
        return tuple(len(s) for s in self.stars)

    @property
    def num_edges(self):
        return sum(self.outdegrees)

    def edges(self):
        """All edges ``(source, target)`` in star order."""
        return [(j, t) for j, s in enumerate(self.stars) for t in s]

    def tadpoles(self):
        return [j for j, s in enumerate(self.stars) if I(j) in s]

    def has_tadpole(self, j):
        return I(j) in self.stars[j]

    def s(self, i, target):
        """Position (0-based) of the edge ``i -> target`` in ``Star(i)``."""
        return self.stars[i].index(target)

    def canon(self):
        parts = [f"{self.m} {self.n}"]
        for s in self.stars:
            parts.append(" ".join(_tgt_text(t) for t in s) if s else "-")
        return " | ".join(parts)

    def to_json(self):
        return {"m": self.m, "n": self.n,
                "stars": [[_tgt_text(t) for t in s] for s in self.stars]}

    def __str__(self):
        return self.canon()


def _tgt_text(t):
    kind, k = t
    return f"i{k + 1}" if kind == "i" else f"b{k}"


def _parse_tgt(tok):
    if tok.startswith("i"):
        return I(int(tok[1:]) - 1)
    if tok.startswith("b"):
        return B(int(tok[1:]))
    raise ValueError(f"bad target {tok!r}")


def parse_graph(text: str) -> ExtGraph:
    fields = [f.strip() for f in text.split("|")]
    head = fields[0].split()
    if len(head) != 2:
        raise ValueError(f"bad graph header {fields[0]!r}")
    m, n = int(head[0]), int(head[1])
    stars = []
    for f in fields[1:]:
        stars.append(() if f in ("", "-") else tuple(_parse_tgt(t) for t in f.split()))
    if m == 0 and stars == [()]:
        stars = []
    return ExtGraph(m, n, tuple(stars))


def graph_from_json(obj) -> ExtGraph:
    return ExtGraph(obj["m"], obj["n"], tuple(tuple(_parse_tgt(t) for t in s) for s in obj["stars"]))


def dumps(g: ExtGraph) -> str:
    return json.dumps(g.to_json())


# -- enumeration

def enumerate_graphs(m, n, outdegs, allow_tadpoles=True):
    """All labeled graphs with the given out-degrees, in a fixed order.

    Targets are ordered ``i1..im, b0..bn``; stars are ordered tuples of
    distinct targets, listed lexicographically.
    """
    outdegs = list(outdegs)
    if len(outdegs) != m:
        raise ValueError("need one out-degree per type I vertex")
    per_vertex = []
    for j, k in enumerate(outdegs):
        targets = [I(v) for v in range(m) if v != j or allow_tadpoles] + [B(b) for b in range(n + 1)]
        per_vertex.append(list(permutations(targets, k)))
    return [ExtGraph(m, n, stars) for stars in product(*per_vertex)]


# -- operators D_Gamma

def evaluate_as_op(g: ExtGraph, gammas) -> PolyDiffOp:
    """The operator ``D_Gamma(gamma_1, ..., gamma_m)`` of arity ``n + 1``.

    Every edge carries a summation index; an edge into a vertex
    differentiates that vertex's coefficient (type I) or argument (type II).
    Components are those of the full antisymmetric tensor, summed over all
    index assignments.
    """
    gammas = list(gammas)
    if len(gammas) != g.m:
        raise ValueError(f"graph has {g.m} type I vertices, got {len(gammas)} inputs")
    if g.m == 0:
        raise ValueError("use PolyDiffOp.multiplication for graphs without type I vertices")
    dim = gammas[0].dim
    for j, (gam, s) in enumerate(zip(gammas, g.stars)):
        if gam.dim != dim:
            raise ValueError("dimension mismatch")
        if gam.degree != len(s):
            raise ValueError(f"vertex {j + 1}: degree {gam.degree} but out-degree {len(s)}")
    edges = g.edges()
    out = PolyDiffOp(dim, g.n + 1)
    comp_cache = {}
    for assign in product(range(dim), repeat=len(edges)):
        inc_i = [[0] * dim for _ in range(g.m)]
        inc_b = [[0] * dim for _ in range(g.n + 1)]
        pos = 0
        idx = []
        for j, s in enumerate(g.stars):
            idx.append(assign[pos:pos + len(s)])
            for (kind, k), a in zip(s, assign[pos:pos + len(s)]):
                (inc_i if kind == "i" else inc_b)[k][a] += 1
            pos += len(s)
        coeff = None
        for j in range(g.m):
            key = (j, idx[j], tuple(inc_i[j]))
            if key not in comp_cache:
                sgn, skey = sort_sign(idx[j])
                if sgn == 0:
                    comp_cache[key] = None
                else:
                    p = gammas[j].comps.get(skey)
                    if p is None:
                        comp_cache[key] = None
                    else:
                        p = p.diff_multi(key[2])
                        comp_cache[key] = (p if sgn > 0 else -p) if p else None
            f = comp_cache[key]
            if f is None:
                coeff = None
                break
            coeff = f if coeff is None else coeff * f
            if not coeff:
                coeff = None
                break
        if coeff is None:
            continue
        out = out + PolyDiffOp.from_slots(coeff, [tuple(r) for r in inc_b])
    return out


def evaluate(g: ExtGraph, gammas, args) -> Polynomial:
    """``D_Gamma(gamma...)`` applied to the functions ``args = (a_0, ..., a_n)``."""
    args = list(args)
    if len(args) != g.n + 1:
        raise ValueError(f"expected {g.n + 1} arguments, got {len(args)}")
    return evaluate_as_op(g, gammas).apply(*args)


# -- surgeries

def sigma_graph(g: ExtGraph) -> ExtGraph:
    """Relabel type II vertices ``b_k -> b_{k+1 mod n+1}``."""
    def move(t):
        return B((t[1] + 1) % (g.n + 1)) if t[0] == "b" else t
    return ExtGraph(g.m, g.n, tuple(tuple(move(t) for t in s) for s in g.stars))


def remove_tadpole(g: ExtGraph, i):
    """Return ``(s(i,i), graph without the tadpole at i)``."""
    if not g.has_tadpole(i):
        raise ValueError(f"vertex {i + 1} has no tadpole")
    s = g.stars[i].index(I(i))
    star = g.stars[i][:s] + g.stars[i][s + 1:]
    return s, ExtGraph(g.m, g.n, g.stars[:i] + (star,) + g.stars[i + 1:])


def add_tadpole(g: ExtGraph, i):
    """All ways to insert a tadpole at ``i``: list of ``(position, graph)``."""
    if g.has_tadpole(i):
        raise ValueError(f"vertex {i + 1} already has a tadpole")
    out = []
    for s in range(len(g.stars[i]) + 1):
        star = g.stars[i][:s] + (I(i),) + g.stars[i][s:]
        out.append((s, ExtGraph(g.m, g.n, g.stars[:i] + (star,) + g.stars[i + 1:])))
    return out


def tadpole_variants(g: ExtGraph, i):
    """Remove the tadpole at ``i`` if present, otherwise list all insertions."""
    if g.has_tadpole(i):
        return [remove_tadpole(g, i)]
    return add_tadpole(g, i)


def contract_edge(g: ExtGraph, i, j):
    """Contract the edge ``i -> j`` between distinct type I vertices.

    The merged vertex becomes vertex 1 with star ``Star(i) - (i,j)`` followed
    by ``Star(j)``; the remaining vertices keep their relative order.  Edges
    into ``i`` or ``j`` go to the merged vertex.  Returns ``[(sign, graph)]``
    with ``sign = (-1)^s(i,j)``, or ``[]`` when a double edge appears.
    """
    if i == j or I(j) not in g.stars[i]:
        raise ValueError(f"no edge i{i + 1} -> i{j + 1}")
    rest = [v for v in range(g.m) if v not in (i, j)]
    newidx = {v: t + 1 for t, v in enumerate(rest)}
    newidx[i] = newidx[j] = 0

    def move(t):
        return I(newidx[t[1]]) if t[0] == "i" else t

    s = g.s(i, I(j))
    merged = tuple(move(t) for t in g.stars[i][:s] + g.stars[i][s + 1:] + g.stars[j])
    stars = [merged] + [tuple(move(t) for t in g.stars[v]) for v in rest]
    if any(len(set(st)) != len(st) for st in stars):
        return []
    # a tadpole arises from an edge j -> i; keep it, it is a single edge
    return [(-1 if s % 2 else 1, ExtGraph(g.m - 1, g.n, tuple(stars)))]


@dataclass(frozen=True)
class Collapse:
    quotient: ExtGraph
    sub: ExtGraph
    I: tuple
    J: tuple
    l: int
    n2: int


def collapse_subgraph(g: ExtGraph, J, l, n2):
    """Collapse type I vertices ``J`` and type II block ``l..l+n2-1``.

    ``J`` is a set of 0-based type I indices and the block uses type II
    labels ``1..n``.  For ``n2 = 0`` the collapsed vertex is a new type II
    vertex inserted at position ``l`` (``1 <= l <= n+1``).  Returns
    :class:`Collapse`, or ``None`` when the boundary term vanishes because an
    edge leaves the cluster or a double edge is created in the quotient.
    """
    J = tuple(sorted(J))
    if n2 < 0 or l < 1 or (n2 > 0 and l + n2 - 1 > g.n) or (n2 == 0 and l > g.n + 1):
        raise ValueError("type II block must lie inside 1..n")
    Iset = tuple(v for v in range(g.m) if v not in J)
    block = set(range(l, l + n2))
    in_cluster = lambda t: (t[0] == "i" and t[1] in J) or (t[0] == "b" and t[1] in block)

    jpos = {v: t for t, v in enumerate(J)}
    sub_stars = []
    for v in J:
        st = []
        for t in g.stars[v]:
            if not in_cluster(t):
                return None
            st.append(I(jpos[t[1]]) if t[0] == "i" else B(t[1] - l + 1))
        sub_stars.append(tuple(st))
    sub = ExtGraph(len(J), n2, tuple(sub_stars))

    ipos = {v: t for t, v in enumerate(Iset)}

    def qb(k):
        if k < l:
            return k
        return k - n2 + 1

    q_stars = []
    for v in Iset:
        st = []
        for t in g.stars[v]:
            if in_cluster(t):
                st.append(B(l))
            elif t[0] == "i":
                st.append(I(ipos[t[1]]))
            else:
                st.append(B(qb(t[1])))
        if len(set(st)) != len(st):
            return None
        q_stars.append(tuple(st))
    quotient = ExtGraph(len(Iset), g.n - n2 + 1, tuple(q_stars))
    return Collapse(quotient, sub, Iset, J, l, n2)
