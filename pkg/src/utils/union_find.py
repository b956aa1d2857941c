"""
Disjoint-set forest used to quotient disjoint unions of graphs
"""

from typing import Dict, List


class UnionFind:
    """
    Union by size with path halving.
    Elements are the integers 0..n-1.
    """

    def __init__(self, n: int):
        self.parents = list(range(n))
        self.sizes = [1] * n

    def __len__(self):
        return len(self.parents)

    def find(self, i: int) -> int:
        parents = self.parents
        while parents[i] != i:
            parents[i] = parents[parents[i]]
            i = parents[i]
        return i

    def union(self, i: int, j: int) -> int:
        """Merge the classes of i and j; returns the surviving root"""
        root_i, root_j = self.find(i), self.find(j)
        if root_i == root_j:
            return root_i
        if self.sizes[root_i] < self.sizes[root_j]:
            root_i, root_j = root_j, root_i
        self.sizes[root_i] += self.sizes[root_j]
        self.parents[root_j] = root_i
        return root_i

    def connected(self, i: int, j: int) -> bool:
        return self.find(i) == self.find(j)

    def labels(self) -> List[int]:
        """
        Dense class ids 0..c-1, assigned in order of each class's smallest
        element, so the labelling does not depend on union order.
        """
        ids: Dict[int, int] = {}
        out = []
        for i in range(len(self.parents)):
            root = self.find(i)
            if root not in ids:
                ids[root] = len(ids)
            out.append(ids[root])
        return out

    def class_count(self) -> int:
        return sum(1 for i, p in enumerate(self.parents) if p == i)
