"""Two-dimensional foliated triangulations encoded as bit arrays of forks.

A fork is one new vertex together with three edges (one space-like, two
time-like) and two triangles. Bit ``(n, m)`` of a ``rows x cols`` array says
whether the fork in slot ``m`` of time step ``n`` is present.

Codec convention
----------------
Row ``n`` fills slice ``n + 1``. Slices ``0`` and ``rows + 1`` are single apex
vertices, and every slice carries a seed vertex at position ``x = 0``; the
seeds are joined into a time-like path from apex to apex. The fork ``(n, m)``
adds vertex ``v`` at ``x = m + 1`` in slice ``s = n + 1`` and joins it to

* ``b``: its left neighbour in slice ``s`` (largest ``x' < x``), space-like;
* ``down``: the vertex of slice ``s - 1`` with the largest ``x' <= x``;
* ``up``: the vertex of slice ``s + 1`` with the largest ``x' < x``;

gluing the triangles ``(v, b, down)`` and ``(v, b, up)``. Positions refer to
the finished array, which amounts to assembling columns left to right and,
within a column, slices bottom to top. The result is a triangulated disk
(``V - E + F = 1``) with ``2 * popcount`` faces; the all-ones array gives a
patch of the regular triangular lattice. Every row must hold at least one fork.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BadParameters, DegenerateRow, NotFoliated

_BLOCK = 1 << 16
MAX_CODE_BITS = 62


# -- arrays ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ForkArray:
    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise BadParameters(f"fork array must be a non-empty 2-D array, got shape {arr.shape}")
        if not np.isin(arr, (0, 1)).all():
            raise BadParameters("fork array entries must be 0 or 1")
        object.__setattr__(self, "bits", np.ascontiguousarray(arr, dtype=np.uint8))

    @property
    def rows(self) -> int:
        return self.bits.shape[0]

    @property
    def cols(self) -> int:
        return self.bits.shape[1]

    @property
    def popcount(self) -> int:
        return int(self.bits.sum())

    def validate(self) -> "ForkArray":
        empty = [int(r) for r in np.flatnonzero(self.bits.sum(axis=1) == 0)]
        if empty:
            raise DegenerateRow(f"rows {empty} contain no fork", rows=empty)
        return self

    def __eq__(self, other):
        return isinstance(other, ForkArray) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bits.shape, self.bits.tobytes()))

    @classmethod
    def ones(cls, rows: int, cols: int) -> "ForkArray":
        return cls(np.ones((rows, cols), dtype=np.uint8))

    @classmethod
    def from_code(cls, code: int, rows: int, cols: int) -> "ForkArray":
        """Bit ``r * cols + c`` of ``code`` is entry ``(r, c)``."""
        k = np.arange(rows * cols, dtype=np.int64)
        return cls(((int(code) >> k) & 1).reshape(rows, cols))

    def code(self) -> int:
        return sum(1 << k for k in np.flatnonzero(self.bits.ravel()).tolist())

    @classmethod
    def from_text(cls, text: str) -> "ForkArray":
        """One row per line, characters ``0``/``1``; the first line is the earliest time step."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise BadParameters("empty fork array")
        widths = {len(ln) for ln in lines}
        if len(widths) != 1:
            raise BadParameters("fork array rows have different lengths")
        if any(ch not in "01" for ln in lines for ch in ln):
            raise BadParameters("fork array may only contain '0' and '1'")
        return cls(np.array([[int(ch) for ch in ln] for ln in lines], dtype=np.uint8))

    def to_text(self) -> str:
        return "".join("".join(str(int(b)) for b in row) + "\n" for row in self.bits)


def valid_arrays(rows: int, cols: int):
    """Every array of the given shape with at least one fork per row, in code order."""
    out = []
    for code in range(1 << (rows * cols)):
        if all((code >> (r * cols)) & ((1 << cols) - 1) for r in range(rows)):
            out.append(ForkArray.from_code(code, rows, cols))
    return out


# -- triangulations -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FoliatedTriangulation:
    """Vertices carry ``(slice, x)`` positions; ``slices`` lists vertex ids ordered by ``x``.

    ``edges`` maps a sorted vertex pair to ``"space"`` or ``"time"``. Each face is
    ``(a, b, c, strip, orientation)`` where ``strip`` is the lower slice it spans
    and ``orientation`` is ``"up"`` when two of its vertices lie on the lower
    slice and ``"down"`` otherwise.
    """
    rows: int
    cols: int
    positions: tuple
    slices: tuple
    edges: dict = field(repr=False)
    faces: tuple = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.positions)

    def neighbours(self):
        adj = [set() for _ in self.positions]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def faces_per_vertex(self) -> np.ndarray:
        counts = np.zeros(self.n_vertices, dtype=np.int64)
        for f in self.faces:
            for v in f[:3]:
                counts[v] += 1
        return counts

    def boundary_vertices(self) -> set:
        """Vertices on an edge that borders a single face."""
        incidence = {e: 0 for e in self.edges}
        for f in self.faces:
            a, b, c = f[:3]
            for e in ((a, b), (b, c), (a, c)):
                incidence[tuple(sorted(e))] += 1
        return {v for e, k in incidence.items() if k < 2 for v in e}

    def apexes(self) -> tuple:
        return self.slices[0][0], self.slices[-1][0]

    def bulk_vertices(self) -> list:
        """Interior vertices not adjacent to an apex (apex neighbours see a collapsed slice)."""
        boundary = self.boundary_vertices()
        adj = self.neighbours()
        apex = set(self.apexes())
        return [v for v in range(self.n_vertices) if v not in boundary and not adj[v] & apex]

    def canonical(self):
        """Position-labelled edge and face sets, for structural comparison."""
        pos = self.positions
        edges = frozenset((frozenset((pos[a], pos[b])), k) for (a, b), k in self.edges.items())
        faces = frozenset((frozenset(pos[v] for v in f[:3]), f[3], f[4]) for f in self.faces)
        return frozenset(pos), edges, faces


def _largest(xs, x, strict):
    best = None
    for xx in xs:
        if xx < x or (not strict and xx == x):
            best = xx
    return best


def decode(array: ForkArray) -> FoliatedTriangulation:
    array.validate()
    rows, cols = array.rows, array.cols
    xs = [[0]] + [[0] + [m + 1 for m in range(cols) if array.bits[n, m]] for n in range(rows)] + [[0]]
    positions, ids = [], {}
    for s, row in enumerate(xs):
        for x in row:
            ids[(s, x)] = len(positions)
            positions.append((s, x))
    slices = tuple(tuple(ids[(s, x)] for x in row) for s, row in enumerate(xs))
    edges = {}

    def add(u, v, kind):
        edges[(min(u, v), max(u, v))] = kind

    for s in range(rows + 1):
        add(ids[(s, 0)], ids[(s + 1, 0)], "time")
    faces = []
    # column-major: left to right, bottom to top
    for m in range(cols):
        for n in range(rows):
            if not array.bits[n, m]:
                continue
            s, x = n + 1, m + 1
            v = ids[(s, x)]
            b = ids[(s, _largest(xs[s], x, strict=True))]
            down = ids[(s - 1, _largest(xs[s - 1], x, strict=False))]
            up = ids[(s + 1, _largest(xs[s + 1], x, strict=True))]
            add(v, b, "space")
            add(v, down, "time")
            add(v, up, "time")
            faces.append((v, b, down, s - 1, "down"))
            faces.append((v, b, up, s, "up"))
    return FoliatedTriangulation(rows, cols, tuple(positions), slices, edges, tuple(faces))


def check_triangulation(tri: FoliatedTriangulation) -> None:
    """Raise ``NotFoliated`` unless faces, edges and slices are mutually consistent."""
    pos = tri.positions
    for (a, b), kind in tri.edges.items():
        ds = abs(pos[a][0] - pos[b][0])
        if (kind == "space") != (ds == 0) or ds > 1:
            raise NotFoliated(f"edge {(a, b)} labelled {kind} joins slices {pos[a][0]} and {pos[b][0]}")
    around = {}
    for f in tri.faces:
        a, b, c, strip, orient = f
        for e in ((a, b), (b, c), (a, c)):
            if tuple(sorted(e)) not in tri.edges:
                raise NotFoliated(f"face {f[:3]} uses missing edge {e}")
        levels = sorted(pos[v][0] for v in (a, b, c))
        if levels[0] != strip or levels[2] != strip + 1:
            raise NotFoliated(f"face {f[:3]} does not span strip {strip}")
        expected = "up" if levels[1] == strip else "down"
        if orient != expected:
            raise NotFoliated(f"face {f[:3]} orientation {orient}, expected {expected}")
        for e in ((a, b), (b, c), (a, c)):
            e = tuple(sorted(e))
            if tri.edges[e] == "space":
                around.setdefault(e, []).append(orient)
    for e, kind in tri.edges.items():
        if kind == "space" and sorted(around.get(e, [])) != ["down", "up"]:
            raise NotFoliated(f"space-like edge {e} borders faces {around.get(e, [])}")
    if tri.n_vertices - len(tri.edges) + len(tri.faces) != 1:
        raise NotFoliated("Euler characteristic of the disk is not 1")


def encode(tri: FoliatedTriangulation) -> ForkArray:
    """Read the fork array off the vertex positions and confirm it re-assembles ``tri``."""
    check_triangulation(tri)
    bits = np.zeros((tri.rows, tri.cols), dtype=np.uint8)
    for s, x in tri.positions:
        if x == 0:
            continue
        if not (1 <= s <= tri.rows and 1 <= x <= tri.cols):
            raise NotFoliated(f"vertex at slice {s}, position {x} is outside the fork slots")
        bits[s - 1, x - 1] = 1
    try:
        array = ForkArray(bits).validate()
    except DegenerateRow as exc:
        raise NotFoliated(str(exc)) from exc
    if decode(array).canonical() != tri.canonical():
        raise NotFoliated("triangulation is not the fork assembly of any array")
    return array


def contract_fork(tri: FoliatedTriangulation, vertex: int) -> FoliatedTriangulation:
    """Remove a fork by contracting its space-like edge onto the left neighbour.

    The two triangles on that edge collapse, the fork's time-like edges merge
    with the neighbour's and every other edge of the vertex moves to the
    neighbour. Vertex ids above ``vertex`` shift down by one.
    """
    s, x = tri.positions[vertex]
    if x == 0 or s in (0, tri.rows + 1):
        raise NotFoliated("seed and apex vertices are not forks")
    row = tri.slices[s]
    i = row.index(vertex)
    if len(row) <= 2:
        raise DegenerateRow(f"removing the fork would empty row {s - 1}", rows=[s - 1])
    left = row[i - 1]

    def ren(v):
        v = left if v == vertex else v
        return v - 1 if v > vertex else v

    edges = {}
    for (a, b), kind in tri.edges.items():
        a, b = ren(a), ren(b)
        if a != b:
            edges[(min(a, b), max(a, b))] = kind
    faces = []
    for a, b, c, strip, orient in tri.faces:
        a, b, c = ren(a), ren(b), ren(c)
        if len({a, b, c}) == 3:
            faces.append((a, b, c, strip, orient))
    positions = tuple(p for v, p in enumerate(tri.positions) if v != vertex)
    slices = tuple(tuple(ren(v) for v in sl if v != vertex) for sl in tri.slices)
    return FoliatedTriangulation(tri.rows, tri.cols, positions, slices, edges, tuple(faces))


# -- observables ----------------------------------------------------------------

def observables(tri: FoliatedTriangulation, lambda_cc: float) -> dict:
    """Volume ``N2``, action ``lambda_cc * N2``, equilateral deficit angles and boundary-aware curvature.

    ``deficit`` is ``2 pi - (pi/3) deg(v)`` at every vertex, which is the Regge
    deficit wherever ``v`` is interior. ``curvature`` replaces it on boundary
    vertices with the turning angle ``pi - (pi/3) f``, ``f`` being the number of
    incident triangles, so ``curvature_total`` is ``2 pi`` for every disk.
    """
    faces = tri.faces_per_vertex()
    adj = tri.neighbours()
    boundary = tri.boundary_vertices()
    deficits, curvature = [], []
    for v in range(tri.n_vertices):
        deficits.append(2.0 * math.pi - (math.pi / 3.0) * len(adj[v]))
        if v in boundary:
            curvature.append(math.pi - (math.pi / 3.0) * int(faces[v]))
        else:
            curvature.append(deficits[-1])
    volume = len(tri.faces)
    bulk = tri.bulk_vertices()
    return {
        "volume": volume,
        "action": float(lambda_cc) * volume,
        "vertices": tri.n_vertices,
        "edges": len(tri.edges),
        "coordination": [len(a) for a in adj],
        "boundary": sorted(boundary),
        "bulk": bulk,
        "bulk_coordination": sorted({len(adj[v]) for v in bulk}),
        "deficit": deficits,
        "deficit_total": math.fsum(deficits),
        "curvature": curvature,
        "curvature_total": math.fsum(curvature),
    }


# -- Metropolis sampling ------------------------------------------------------------

def acceptance_probabilities(lambda_cc: float):
    """``(p_add, p_remove)``: one fork adds two faces, so ``dS = +-2 lambda_cc``."""
    lam = float(lambda_cc)
    p_add = 1.0 if lam <= 0 else math.exp(-2.0 * lam)
    p_remove = 1.0 if lam >= 0 else math.exp(2.0 * lam)
    return p_add, p_remove


@dataclass
class ChainResult:
    rows: int
    cols: int
    lambda_cc: float
    steps: int
    seed: int
    thin: int
    samples: list  # (step, volume, action, acceptance_rate, mean_volume, mean_action)
    accepted: int
    mean_volume: float
    mean_action: float
    final: ForkArray
    histogram: dict | None  # state code -> visit count over all steps

    def summary(self) -> dict:
        return {
            "rows": self.rows, "cols": self.cols, "lambda_cc": self.lambda_cc,
            "steps": self.steps, "seed": self.seed, "thin": self.thin,
            "acceptance_rate": self.accepted / self.steps,
            "mean_volume": self.mean_volume, "mean_action": self.mean_action,
            "final": self.final.to_text().split(),
        }

    def distribution(self) -> dict:
        if self.histogram is None:
            raise BadParameters("state histogram is only kept for arrays of at most 62 bits")
        return {k: c / self.steps for k, c in self.histogram.items()}

    def csv(self) -> str:
        lines = ["step,volume,action,acceptance_rate,mean_volume,mean_action"]
        lines += [f"{s},{v},{a!r},{r!r},{mv!r},{ma!r}" for s, v, a, r, mv, ma in self.samples]
        return "\n".join(lines) + "\n"


def metropolis_sample(rows: int, cols: int, lambda_cc: float, steps: int, seed: int,
                      thin: int = 1000, start: ForkArray | None = None) -> ChainResult:
    """Single-bit-flip Metropolis chain over valid fork arrays with weight ``exp(-lambda_cc N2)``.

    Each step proposes flipping a uniformly chosen bit; flips that would empty
    a row are rejected. Sites and uniforms come from one PCG64 stream seeded by
    ``seed``, drawn in fixed blocks, so the chain is identical on every backend.
    """
    if rows < 1 or cols < 1:
        raise BadParameters("rows and cols must be >= 1")
    if steps < 1 or thin < 1:
        raise BadParameters("steps and thin must be >= 1")
    if not math.isfinite(float(lambda_cc)):
        raise BadParameters("lambda_cc must be finite")
    if seed < 0 or seed >= 2 ** 64:
        raise BadParameters("seed must be a 64-bit unsigned integer")
    state = (start or ForkArray.ones(rows, cols)).validate()
    if state.bits.shape != (rows, cols):
        raise BadParameters("start array has the wrong shape")
    lam = float(lambda_cc)
    p_add, p_remove = acceptance_probabilities(lam)
    bits = state.bits.ravel().copy()
    rowcount = state.bits.sum(axis=1).astype(np.int64)
    nbits = rows * cols
    record = nbits <= MAX_CODE_BITS
    code = state.code() if record else 0
    dense_hist = np.zeros(1 << nbits, dtype=np.int64) if nbits <= 20 else None
    hist = {} if record and dense_hist is None else None
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    accepted = 0
    pop_total = 0
    pop = state.popcount
    samples = []
    done = 0
    while done < steps:
        m = min(_BLOCK, steps - done)
        sites = rng.integers(0, nbits, size=m, dtype=np.int64)
        uniforms = rng.random(m)
        pops = np.empty(m, dtype=np.int64)
        codes = np.empty(m if record else 0, dtype=np.int64)
        _, _, code = kernels.fork_chain(bits, rowcount, cols, p_add, p_remove, sites, uniforms, pops, codes, code)
        # every accepted flip changes the popcount by one, every rejection leaves it alone
        acc = accepted + np.cumsum(np.diff(pops, prepend=pop) != 0)
        cum = pop_total + np.cumsum(pops)
        first = (-done - 1) % thin  # offset of the first step number divisible by thin
        for j in range(first, m, thin):
            step = done + j + 1
            vol = 2 * int(pops[j])
            mean_vol = 2.0 * int(cum[j]) / step
            samples.append((step, vol, lam * vol, int(acc[j]) / step, mean_vol, lam * mean_vol))
        accepted = int(acc[-1])
        pop_total = int(cum[-1])
        pop = int(pops[-1])
        if dense_hist is not None:
            dense_hist += np.bincount(codes, minlength=1 << nbits)
        elif hist is not None:
            vals, counts = np.unique(codes, return_counts=True)
            for v, c in zip(vals.tolist(), counts.tolist()):
                hist[v] = hist.get(v, 0) + c
        done += m
    if dense_hist is not None:
        hist = {int(k): int(dense_hist[k]) for k in np.flatnonzero(dense_hist)}
    mean_volume = 2.0 * pop_total / steps
    final = ForkArray(bits.reshape(rows, cols))
    return ChainResult(rows, cols, lam, steps, seed, thin, samples, accepted,
                       mean_volume, lam * mean_volume, final, hist)


# -- exact references -------------------------------------------------------------

def boltzmann_distribution(rows: int, cols: int, lambda_cc: float) -> dict:
    """Exact stationary law ``exp(-lambda_cc N2) / Z`` over valid arrays, keyed by state code."""
    arrays = valid_arrays(rows, cols)
    w = np.array([math.exp(-float(lambda_cc) * 2 * a.popcount) for a in arrays])
    w /= math.fsum(w)
    return {a.code(): float(p) for a, p in zip(arrays, w)}


def transition_matrix(rows: int, cols: int, lambda_cc: float):
    """Exact one-step kernel of the chain: ``(codes, P)`` with ``P[i, j] = P(codes[i] -> codes[j])``."""
    arrays = valid_arrays(rows, cols)
    codes = [a.code() for a in arrays]
    index = {c: i for i, c in enumerate(codes)}
    p_add, p_remove = acceptance_probabilities(lambda_cc)
    nbits = rows * cols
    P = np.zeros((len(codes), len(codes)))
    for i, a in enumerate(arrays):
        counts = a.bits.sum(axis=1)
        for k in range(nbits):
            r = k // cols
            if a.bits.ravel()[k]:
                p = p_remove if counts[r] > 1 else 0.0
            else:
                p = p_add
            if p > 0:
                P[i, index[codes[i] ^ (1 << k)]] += p / nbits
        P[i, i] = 1.0 - P[i].sum()
    return codes, P


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
