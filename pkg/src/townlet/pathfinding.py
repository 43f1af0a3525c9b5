"""Deterministic A* over the walkable grid (4-connected, unit step cost)."""

from __future__ import annotations

import heapq

from .errors import UnreachableError
from .world import GridPos, WorldMap

_STEPS = ((0, -1), (-1, 0), (1, 0), (0, 1))


def manhattan(a: GridPos, b: GridPos) -> int:
    return abs(a.x - b.x) + abs(a.y - b.y)


def find_path(world: WorldMap, start: GridPos, goal: GridPos) -> list[GridPos]:
    """Shortest 4-connected walkable path from start to goal.

    Returns the waypoints to visit, excluding start and including goal, so the
    result is empty iff start == goal. Ties are broken by (f, h, y, x), which
    pins both the expansion order and the resulting path. Raises
    UnreachableError when no path exists (never returns a bogus empty path).
    """
    if not world.is_walkable(start):
        raise UnreachableError(f"start not walkable: {tuple(start)}")
    if not world.is_walkable(goal):
        raise UnreachableError(f"goal not walkable: {tuple(goal)}")
    if start == goal:
        return []

    g_score: dict[GridPos, int] = {start: 0}
    came_from: dict[GridPos, GridPos] = {}
    h0 = manhattan(start, goal)
    open_heap: list[tuple[int, int, int, int]] = [(h0, h0, start.y, start.x)]
    closed: set[GridPos] = set()

    while open_heap:
        _, _, y, x = heapq.heappop(open_heap)
        node = GridPos(x, y)
        if node == goal:
            path = [node]
            while node in came_from:
                node = came_from[node]
                path.append(node)
            path.reverse()
            return path[1:]  # exclude start
        if node in closed:
            continue
        closed.add(node)
        g_here = g_score[node]
        for dx, dy in _STEPS:
            nxt = GridPos(x + dx, y + dy)
            if not world.is_walkable(nxt) or nxt in closed:
                continue
            tentative = g_here + 1
            if tentative < g_score.get(nxt, 1 << 30):
                g_score[nxt] = tentative
                came_from[nxt] = node
                h = manhattan(nxt, goal)
                heapq.heappush(open_heap, (tentative + h, h, nxt.y, nxt.x))

    raise UnreachableError(f"no path from {tuple(start)} to {tuple(goal)}")


def reachable(world: WorldMap, start: GridPos, goal: GridPos) -> bool:
    try:
        find_path(world, start, goal)
        return True
    except UnreachableError:
        return False
