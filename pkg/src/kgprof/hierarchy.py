"""Class hierarchy over ``rdfs:subClassOf`` with cycles condensed."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import vocab
from .index import DatasetIndex, TermPartition

__all__ = ["ClassHierarchy", "build_hierarchy"]


@dataclass
class ClassHierarchy:
    """Condensed class DAG.

    Node ``n`` holds the class ids ``members[n]``; ``parents[n]`` and
    ``children[n]`` are sorted node lists.  ``node_of`` maps a class id to
    its node.  ``transitive_instances[n]`` is the union of the direct
    instances of ``n`` and of all its descendants.
    """

    members: list
    parents: list
    children: list
    roots: list
    node_of: dict
    direct_instances: list
    transitive_instances: list
    depth: list
    names: list
    top: Optional[int] = None

    def __len__(self):
        return len(self.members)

    def direct_count(self, node):
        return len(self.direct_instances[node])

    def transitive_count(self, node):
        return len(self.transitive_instances[node])

    def descendants(self, node):
        seen = {node}
        queue = deque([node])
        while queue:
            for c in self.children[queue.popleft()]:
                if c not in seen:
                    seen.add(c)
                    queue.append(c)
        return seen

    def all_instances(self):
        out = set()
        for r in self.roots:
            out |= self.transitive_instances[r]
        return out


def build_hierarchy(index: DatasetIndex, partition: Optional[TermPartition] = None) -> ClassHierarchy:
    """Condense subclass cycles and attach instance populations.

    When ``owl:Thing`` is a class it becomes the only root and every other
    parentless node is hung beneath it; otherwise all parentless nodes are
    roots.  Depth is the shortest distance from a root.
    """
    partition = partition if partition is not None else index.partition
    class_ids = sorted(partition.classes, key=index.decode)
    local = {cid: i for i, cid in enumerate(class_ids)}
    n = len(class_ids)

    sub_s, sub_o = index.triples_with_predicate(vocab.RDFS_SUBCLASSOF)
    edges = [(local[a], local[b]) for a, b in zip(sub_s.tolist(), sub_o.tolist()) if a != b]
    if n:
        rows = np.fromiter((a for a, _ in edges), dtype=np.int64, count=len(edges))
        cols = np.fromiter((b for _, b in edges), dtype=np.int64, count=len(edges))
        graph = coo_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n)).tocsr()
        _, labels = connected_components(graph, directed=True, connection="strong")
    else:
        labels = np.empty(0, dtype=np.int64)

    # Renumber components by their smallest member key so node ids are deterministic.
    comp_members: dict = {}
    for i, comp in enumerate(labels.tolist()):
        comp_members.setdefault(comp, []).append(class_ids[i])
    ordered = sorted(comp_members.values(), key=lambda ms: index.decode(ms[0]))
    members = [sorted(ms, key=index.decode) for ms in ordered]
    node_of = {cid: k for k, ms in enumerate(members) for cid in ms}
    names = [index.decode(ms[0]) for ms in members]
    size = len(members)

    parent_sets = [set() for _ in range(size)]
    for a, b in edges:
        na, nb = node_of[class_ids[a]], node_of[class_ids[b]]
        if na != nb:
            parent_sets[na].add(nb)

    thing_id = index.lookup(vocab.OWL_THING)
    top = node_of.get(thing_id) if thing_id is not None else None
    if top is not None:
        parent_sets[top].clear()
        for k in range(size):
            if k != top and not parent_sets[k]:
                parent_sets[k].add(top)
    parents = [sorted(ps) for ps in parent_sets]
    children = [[] for _ in range(size)]
    for k, ps in enumerate(parents):
        for p in ps:
            children[p].append(k)
    roots = [k for k in range(size) if not parents[k]]

    depth = [-1] * size
    queue = deque(roots)
    for r in roots:
        depth[r] = 0
    while queue:
        k = queue.popleft()
        for c in children[k]:
            if depth[c] < 0:
                depth[c] = depth[k] + 1
                queue.append(c)

    direct = [set() for _ in range(size)]
    instances = partition.instances
    type_s, type_o = index.triples_with_predicate(vocab.RDF_TYPE)
    for s, o in zip(type_s.tolist(), type_o.tolist()):
        k = node_of.get(o)
        if k is not None and s in instances:
            direct[k].add(s)

    transitive = [None] * size
    for k in _children_first(children, roots, size):
        acc = set(direct[k])
        for c in children[k]:
            acc |= transitive[c]
        transitive[k] = acc

    return ClassHierarchy(
        members=members,
        parents=parents,
        children=children,
        roots=roots,
        node_of=node_of,
        direct_instances=direct,
        transitive_instances=transitive,
        depth=depth,
        names=names,
        top=top,
    )


def _children_first(children, roots, size):
    """Post-order over the DAG: every node appears after all of its descendants."""
    done = [False] * size
    order = []
    for r in roots:
        if done[r]:
            continue
        stack = [(r, iter(children[r]))]
        done[r] = True
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                order.append(node)
            elif not done[nxt]:
                done[nxt] = True
                stack.append((nxt, iter(children[nxt])))
    return order
