import random

import networkx as nx
import pytest

from perco_iso.errors import BudgetExceeded
from perco_iso.steiner import steiner_dp, steiner_exhaustive, steiner_tree_size

from oracles import naive_steiner


def _adj(g):
    return {v: set(g[v]) for v in g}


def test_four_cycle():
    g = nx.cycle_graph(4)
    assert steiner_tree_size(_adj(g), [0, 1, 2, 3]) == 3
    assert steiner_tree_size(_adj(g), [0, 2]) == 2
    assert steiner_tree_size(_adj(g), [1]) == 0


@pytest.mark.parametrize("seed", range(25))
def test_random_graphs_against_bruteforce(seed):
    rng = random.Random(seed)
    g = nx.gnm_random_graph(rng.randint(3, 8), rng.randint(3, 11), seed=seed)
    comp = max(nx.connected_components(g), key=len)
    g = g.subgraph(comp).copy()
    if g.number_of_edges() == 0:
        return
    terms = rng.sample(sorted(g), rng.randint(1, len(g)))
    expected = naive_steiner(g, terms)
    assert steiner_dp(_adj(g), terms) == expected
    assert steiner_exhaustive(_adj(g), terms) == expected


def test_budget():
    g = nx.grid_2d_graph(6, 6)
    terms = [v for v in g if 0 in v or 5 in v]
    with pytest.raises(BudgetExceeded):
        steiner_tree_size(_adj(g), terms)
