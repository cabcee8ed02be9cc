"""Strongly connected components for small adjacency-function graphs."""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable


def strongly_connected_components(
    vertices: Iterable[Hashable], successors: Callable[[Hashable], Iterable[Hashable]]
) -> list[list[Hashable]]:
    """Tarjan's algorithm, iterative so deep graphs do not hit the recursion limit.

    Components come out in reverse topological order: every edge leaving a
    component points into a component that was emitted earlier.
    """
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    components: list[list] = []
    counter = 0

    for root in vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(successors(root)))]
        while work:
            v, it = work[-1]
            advanced = False
            for u in it:
                if u not in index:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack.add(u)
                    work.append((u, iter(successors(u))))
                    advanced = True
                    break
                if u in on_stack and index[u] < low[v]:
                    low[v] = index[u]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                component = []
                while True:
                    u = stack.pop()
                    on_stack.discard(u)
                    component.append(u)
                    if u == v:
                        break
                components.append(component)
    return components


def is_cyclic_component(component, successors) -> bool:
    """True when the component contains a cycle (size > 1 or a self-loop)."""
    if len(component) > 1:
        return True
    v = component[0]
    return any(u == v for u in successors(v))
