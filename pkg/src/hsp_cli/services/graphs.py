"""Graph isomorphism problems reduced to one another through an isomorphism oracle.

Graphs are labelled by attaching path gadgets that every automorphism must
fix. Mapping, counting, partition and generator problems are then answered by
repeated isomorphism queries, and isomorphism is recovered from each of them
through the disjoint union of the two inputs. The S_n coset oracle encodes a
permuted graph canonically.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np

from hsp_cli.config import settings
from hsp_cli.services.ehk import CosetTableOracle, FiniteGroupTable
from hsp_cli.services.hsp_errors import CapabilityError, ConfigError, DomainError
from hsp_cli.services.statevec import SeedLike, make_rng

logger = logging.getLogger(__name__)

Edge = tuple[int, int]
Mapping = tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1 with a sorted edge list of sorted pairs."""

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 0:
            raise DomainError(f"Vertex count must be non-negative, got {self.n}")
        normalized = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise DomainError(f"Self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"Edge ({u}, {v}) outside vertices 0..{self.n - 1}")
            normalized.add((min(u, v), max(u, v)))
        if len(normalized) != len(self.edges):
            raise DomainError("Duplicate edges")
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    # -- constructors ----------------------------------------------------------

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls(n, tuple(itertools.combinations(range(n), 2)))

    @classmethod
    def random(cls, n: int, p: float = 0.5, seed: SeedLike = None) -> Graph:
        rng = make_rng(seed)
        return cls.from_networkx(nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31))))

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> Graph:
        index = {v: i for i, v in enumerate(sorted(graph.nodes))}
        return cls(len(index), tuple((index[u], index[v]) for u, v in graph.edges))

    @classmethod
    def parse(cls, text: str) -> Graph:
        """First line "n m", then m lines "u v" (0-based)."""
        lines = [line.split() for line in text.strip().splitlines() if line.strip()]
        try:
            n, m = int(lines[0][0]), int(lines[0][1])
            edges = tuple((int(a), int(b)) for a, b in lines[1:])
        except (IndexError, ValueError) as e:
            raise ConfigError(f"Malformed graph file: {e}") from e
        if len(edges) != m:
            raise ConfigError(f"Graph header announces {m} edges, found {len(edges)}")
        try:
            return cls(n, edges)
        except DomainError as e:
            raise ConfigError(str(e)) from e

    def to_text(self) -> str:
        return "\n".join([f"{self.n} {len(self.edges)}", *(f"{u} {v}" for u, v in self.edges)]) + "\n"

    # -- structure -------------------------------------------------------------

    @cached_property
    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            adj[u, v] = adj[v, u] = True
        adj.setflags(write=False)
        return adj

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u, v])

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph

    def is_connected(self) -> bool:
        return self.n <= 1 or nx.is_connected(self.to_networkx())


def complement(G: Graph) -> Graph:
    present = set(G.edges)
    return Graph(G.n, tuple(e for e in itertools.combinations(range(G.n), 2) if e not in present))


def disjoint_union(G1: Graph, G2: Graph) -> Graph:
    """G2's vertices are shifted by G1.n."""
    shifted = tuple((u + G1.n, v + G1.n) for u, v in G2.edges)
    return Graph(G1.n + G2.n, G1.edges + shifted)


def relabel(G: Graph, perm: Sequence[int]) -> Graph:
    """pi(G): edge (u, v) becomes (pi[u], pi[v])."""
    if sorted(perm) != list(range(G.n)):
        raise DomainError(f"Not a permutation of {G.n} vertices: {perm}")
    return Graph(G.n, tuple((perm[u], perm[v]) for u, v in G.edges))


def is_isomorphism(G1: Graph, G2: Graph, mapping: Sequence[int]) -> bool:
    return G1.n == G2.n and sorted(mapping) == list(range(G1.n)) and relabel(G1, mapping).edges == G2.edges


# =============================================================================
# Brute force
# =============================================================================


def _check_brute_force(*graphs: Graph) -> None:
    largest = max(g.n for g in graphs)
    if largest > settings.max_brute_force_vertices:
        raise CapabilityError("brute-force graph", largest, settings.max_brute_force_vertices)


def _isomorphisms(G1: Graph, G2: Graph) -> Iterator[Mapping]:
    """Backtracking over vertex assignments, pruned by degree and adjacency to earlier choices."""
    if G1.n != G2.n or len(G1.edges) != len(G2.edges):
        return
    if sorted(G1.degrees.tolist()) != sorted(G2.degrees.tolist()):
        return
    n = G1.n
    mapping = [-1] * n
    used = [False] * n

    def extend(v: int) -> Iterator[Mapping]:
        if v == n:
            yield tuple(mapping)
            return
        for u in range(n):
            if used[u] or G1.degrees[v] != G2.degrees[u]:
                continue
            if any(G1.adjacency[v, w] != G2.adjacency[u, mapping[w]] for w in range(v)):
                continue
            mapping[v], used[u] = u, True
            yield from extend(v + 1)
            mapping[v], used[u] = -1, False

    yield from extend(0)


def brute_force_iso(G1: Graph, G2: Graph) -> Mapping | None:
    """An isomorphism G1 -> G2 (image of vertex i at index i), or None."""
    _check_brute_force(G1, G2)
    return next(_isomorphisms(G1, G2), None)


def automorphisms(G: Graph) -> list[Mapping]:
    _check_brute_force(G)
    return list(_isomorphisms(G, G))


def orbit_partition(G: Graph) -> list[frozenset[int]]:
    """Orbits of aut G by brute force, sorted by least vertex."""
    auts = automorphisms(G)
    cells = {frozenset(a[v] for a in auts) for v in range(G.n)}
    return sorted(cells, key=min)


def permutation_closure(generators: Iterable[Sequence[int]], n: int) -> set[Mapping]:
    """The permutation group the generators produce."""
    identity = tuple(range(n))
    gens = [tuple(g) for g in generators]
    group = {identity}
    frontier = [identity]
    while frontier:
        fresh = []
        for a in frontier:
            for g in gens:
                b = tuple(g[a[v]] for v in range(n))
                if b not in group:
                    group.add(b)
                    fresh.append(b)
        frontier = fresh
    return group


# =============================================================================
# Labels and the isomorphism oracle
# =============================================================================


@dataclass(frozen=True)
class LabelledGraph:
    """Base graph with label m = 1..k attached to ``labelled[m-1]``."""

    base: Graph
    labelled: tuple[int, ...]
    graph: Graph = field(repr=False)


def gadget_size(n: int, label: int) -> int:
    return 2 * n + label + 3


def attach_labels(G: Graph, vertices: Sequence[int]) -> LabelledGraph:
    """Hang a path gadget off each vertex: path of n+1, a branch vertex, then paths of n+1 and m."""
    vertices = tuple(int(v) for v in vertices)
    if len(set(vertices)) != len(vertices):
        raise DomainError(f"Labelled vertices must be distinct, got {vertices}")
    if any(not 0 <= v < G.n for v in vertices):
        raise DomainError(f"Labelled vertex outside 0..{G.n - 1}")
    n = G.n
    edges = list(G.edges)
    next_vertex = n

    def hang_path(start: int, length: int) -> int:
        nonlocal next_vertex
        previous = start
        for _ in range(length):
            edges.append((previous, next_vertex))
            previous = next_vertex
            next_vertex += 1
        return previous

    for label, v in enumerate(vertices, start=1):
        end = hang_path(v, n + 1)
        branch = hang_path(end, 1)
        hang_path(branch, n + 1)
        hang_path(branch, label)
    return LabelledGraph(G, vertices, Graph(next_vertex, tuple(edges)))


@dataclass
class IsoOracle:
    """Pluggable isomorphism decider that counts its calls."""

    decide: Callable[[Graph, Graph], bool]
    name: str = "custom"
    calls: int = 0

    @classmethod
    def networkx(cls) -> IsoOracle:
        """VF2 through networkx."""
        return cls(lambda a, b: nx.is_isomorphic(a.to_networkx(), b.to_networkx()), "networkx")

    @classmethod
    def brute_force(cls) -> IsoOracle:
        return cls(lambda a, b: brute_force_iso(a, b) is not None, "brute-force")

    def __call__(self, G1: Graph, G2: Graph) -> bool:
        self.calls += 1
        return bool(self.decide(G1, G2))

    def labelled(self, G1: Graph, labels1: Sequence[int], G2: Graph, labels2: Sequence[int]) -> bool:
        """Isomorphism of G1 and G2 with identical labels 1..k on the given vertices."""
        return self(attach_labels(G1, labels1).graph, attach_labels(G2, labels2).graph)


def _oracle(oracle: IsoOracle | None) -> IsoOracle:
    return oracle if oracle is not None else IsoOracle.networkx()


# =============================================================================
# Problems reduced to ISO
# =============================================================================


def _extend_isomorphism(G1: Graph, G2: Graph, sources: list[int], targets: list[int], oracle: IsoOracle) -> Mapping | None:
    """Fix further vertices of G1 one at a time, assuming the given pairs extend to an isomorphism."""
    sources, targets = list(sources), list(targets)
    for v in range(G1.n):
        if v in sources:
            continue
        for u in range(G2.n):
            if u in targets:
                continue
            if oracle.labelled(G1, [*sources, v], G2, [*targets, u]):
                sources.append(v)
                targets.append(u)
                break
        else:
            return None
    mapping = [0] * G1.n
    for v, u in zip(sources, targets, strict=True):
        mapping[v] = u
    return tuple(mapping)


def imap_via_iso(G1: Graph, G2: Graph, oracle: IsoOracle | None = None) -> Mapping | None:
    """An isomorphism G1 -> G2 from at most n(n+1) oracle calls, or None."""
    oracle = _oracle(oracle)
    if G1.n != G2.n or not oracle(G1, G2):
        return None
    return _extend_isomorphism(G1, G2, [], [], oracle)


def _orbit_of(G: Graph, fixed: list[int], v: int, oracle: IsoOracle) -> list[int]:
    """Vertices u with G_{fixed, v} = G_{fixed, u}: the orbit of v in the pointwise stabilizer of ``fixed``."""
    orbit = [v]
    for u in range(G.n):
        if u == v or u in fixed:
            continue
        if oracle.labelled(G, [*fixed, v], G, [*fixed, u]):
            orbit.append(u)
    return orbit


def acount_via_iso(G: Graph, oracle: IsoOracle | None = None) -> int:
    """|aut G| = d_1 d_2 ... d_n over the stabilizer chain of 0, 1, ..., n-1."""
    oracle = _oracle(oracle)
    count = 1
    for k in range(G.n):
        count *= len(_orbit_of(G, list(range(k)), k, oracle))
    return count


def icount_via_iso(G1: Graph, G2: Graph, oracle: IsoOracle | None = None) -> int:
    """Number of isomorphisms: 0, or |aut G1|."""
    oracle = _oracle(oracle)
    if G1.n != G2.n or not oracle(G1, G2):
        return 0
    return acount_via_iso(G1, oracle)


def apart_via_iso(G: Graph, oracle: IsoOracle | None = None) -> list[frozenset[int]]:
    """Automorphism partition: u and v share a cell when G_u = G_v."""
    oracle = _oracle(oracle)
    cells: list[list[int]] = []
    for v in range(G.n):
        for cell in cells:
            if oracle.labelled(G, [cell[0]], G, [v]):
                cell.append(v)
                break
        else:
            cells.append([v])
    return [frozenset(cell) for cell in cells]


def agen_via_iso(G: Graph, oracle: IsoOracle | None = None) -> list[Mapping]:
    """Generators of aut G: per level k, one map sending k to each other vertex of its orbit."""
    oracle = _oracle(oracle)
    generators: list[Mapping] = []
    for k in range(G.n):
        fixed = list(range(k))
        for u in _orbit_of(G, fixed, k, oracle)[1:]:
            phi = _extend_isomorphism(G, G, [*fixed, k], [*fixed, u], oracle)
            if phi is None:
                raise DomainError(f"Oracle is inconsistent: orbit member {u} of {k} has no extension")
            generators.append(phi)
    logger.debug("agen on %d vertices: %d generators, %d oracle calls", G.n, len(generators), oracle.calls)
    return generators


# =============================================================================
# ISO recovered from the other problems
# =============================================================================


def _union_of_connected(G1: Graph, G2: Graph) -> Graph | None:
    """G1 + G2 after complementing disconnected inputs; None when connectivity already differs."""
    c1, c2 = G1.is_connected(), G2.is_connected()
    if c1 != c2:
        return None
    if not c1:
        G1, G2 = complement(G1), complement(G2)
    return disjoint_union(G1, G2)


def iso_via_acount(G1: Graph, G2: Graph, acount: Callable[[Graph], int] | None = None) -> bool:
    """|aut G1| = |aut G2| and |aut G1| |aut G2| != |aut G3|."""
    acount = acount or acount_via_iso
    union = _union_of_connected(G1, G2)
    if union is None or G1.n != G2.n:
        return False
    a1, a2, a3 = acount(G1), acount(G2), acount(union)
    return a1 == a2 and a1 * a2 != a3


def iso_via_agen(G1: Graph, G2: Graph, agen: Callable[[Graph], list[Mapping]] | None = None) -> bool:
    """Some generator of aut G3 sends a vertex of G1 into G2."""
    agen = agen or agen_via_iso
    union = _union_of_connected(G1, G2)
    if union is None or G1.n != G2.n:
        return False
    return any(sigma[v] >= G1.n for sigma in agen(union) for v in range(G1.n))


def iso_via_apart(G1: Graph, G2: Graph, apart: Callable[[Graph], list[frozenset[int]]] | None = None) -> bool:
    """Some automorphism-partition cell of G3 meets both G1 and G2."""
    apart = apart or apart_via_iso
    union = _union_of_connected(G1, G2)
    if union is None or G1.n != G2.n:
        return False
    return any(min(cell) < G1.n <= max(cell) for cell in apart(union))


# =============================================================================
# S_n coset oracle
# =============================================================================


@dataclass(frozen=True, eq=False)
class PermutationOracle:
    """f(pi) = pi(G) as a sorted edge list, over S_n in lexicographic order."""

    graph: Graph
    perms: tuple[Mapping, ...] = field(repr=False)
    labels: np.ndarray = field(repr=False)

    def __call__(self, perm: Sequence[int]) -> tuple[Edge, ...]:
        return relabel(self.graph, perm).edges

    @property
    def distinct_values(self) -> int:
        return int(self.labels.max()) + 1

    def table_oracle(self) -> tuple[FiniteGroupTable, CosetTableOracle]:
        """The same oracle over the S_n Cayley table, for the measurement cascade."""
        table = FiniteGroupTable.from_permutations(self.graph.n)
        return table, CosetTableOracle(table, self.labels)


def perm_oracle(G: Graph) -> PermutationOracle:
    if G.n > settings.max_perm_oracle_vertices:
        raise CapabilityError("S_n oracle vertex count", G.n, settings.max_perm_oracle_vertices)
    perms = tuple(itertools.permutations(range(G.n)))
    encoded = [relabel(G, p).edges for p in perms]
    index: dict[tuple[Edge, ...], int] = {}
    labels = np.fromiter((index.setdefault(e, len(index)) for e in encoded), dtype=np.int64, count=len(perms))
    return PermutationOracle(G, perms, labels)


def graph_corpus(max_vertices: int) -> list[Graph]:
    """All graphs up to isomorphism with 1..max_vertices vertices (atlas covers up to 7)."""
    if max_vertices > 7:
        raise CapabilityError("graph atlas vertex count", max_vertices, 7)
    return [Graph.from_networkx(g) for g in nx.graph_atlas_g() if 1 <= g.number_of_nodes() <= max_vertices]
