import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_edges
from diter.errors import CompletionError, EdgeListError, EmptyInputError
from diter.graph import (
    EdgeList,
    SparseColumnMatrix,
    build_stochastic,
    closed_class_count,
    complete_graph,
    compute_stats,
    load_edge_list,
    recursive_sources,
    write_edge_list,
)
from diter.rng import SplitMix64


def parse(text):
    return load_edge_list(io.StringIO(text))


class TestLoad:
    def test_basic(self):
        e = parse("0 1\n1 2\n")
        assert e.n == 3
        assert e.edges == [(0, 1), (1, 2)]

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            parse("")

    def test_comments_only_is_empty(self):
        with pytest.raises(EmptyInputError):
            parse("# nothing here\n\n")

    def test_duplicates_kept_then_deduplicated(self):
        e = parse("0 1\n0 1\n")
        assert e.edges == [(0, 1), (0, 1)]
        assert build_stochastic(e).nnz == 1

    def test_header_sets_dimension(self):
        e = parse("# a comment\nN 5\n0 1\n")
        assert e.n == 5

    def test_header_without_edges(self):
        assert parse("N 4\n").n == 4

    def test_id_beyond_header(self):
        with pytest.raises(EdgeListError) as exc:
            parse("N 2\n0 1\n1 2\n")
        assert exc.value.line == 3

    @pytest.mark.parametrize("bad, line", [("0 1\n1\n", 2), ("0 1\n# c\na b\n", 3), ("0 -1\n", 1), ("0 1 2\n", 1)])
    def test_malformed_reports_line(self, bad, line):
        with pytest.raises(EdgeListError) as exc:
            parse(bad)
        assert exc.value.line == line
        assert f"line {line}" in str(exc.value)

    def test_overflow(self):
        with pytest.raises(EdgeListError, match="overflow"):
            parse(f"0 {2**40}\n")

    def test_round_trip(self):
        e = EdgeList(4, [(0, 3), (2, 1), (3, 3)])
        buf = io.StringIO()
        write_edge_list(e, buf)
        buf.seek(0)
        assert load_edge_list(buf) == e

    def test_edge_out_of_range(self):
        with pytest.raises(EdgeListError):
            EdgeList(2, [(0, 2)])


class TestBuild:
    def test_chain(self):
        m = build_stochastic(EdgeList(3, [(0, 1), (1, 2)]))
        assert m.triplets() == [(1, 0, 1.0), (2, 1, 1.0)]
        assert list(m.out_degree()) == [1, 1, 0]
        assert not m.is_column_stochastic

    def test_uniform_split(self):
        m = build_stochastic(EdgeList(3, [(0, 1), (0, 2)]))
        assert m.triplets() == [(1, 0, 0.5), (2, 0, 0.5)]

    def test_dedup_before_weighting(self):
        m = build_stochastic(EdgeList(3, [(0, 1), (0, 1), (0, 2)]))
        assert m.triplets() == [(1, 0, 0.5), (2, 0, 0.5)]

    def test_stochastic_flag(self):
        assert build_stochastic(EdgeList(2, [(0, 1), (1, 0)])).is_column_stochastic

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 40), st.integers(0, 2**32), st.integers(0, 200))
    def test_column_sums(self, n, seed, extra):
        rng = np.random.default_rng(seed)
        edges = [(i, int(rng.integers(n))) for i in range(n)] + random_edges(rng, n, extra)
        m = build_stochastic(EdgeList(n, edges))
        assert m.is_column_stochastic
        assert np.all(np.abs(m.column_sums() - 1.0) <= 1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 30), st.integers(0, 2**32))
    def test_row_column_round_trip(self, n, seed):
        rng = np.random.default_rng(seed)
        m = build_stochastic(EdgeList(n, random_edges(rng, n, 3 * n)))
        rows = m.to_rows()
        assert rows.triplets() == m.triplets()
        back = rows.to_columns()
        assert back.triplets() == m.triplets()
        assert np.array_equal(back.data, m.data)

    def test_row_mirror_is_bitwise(self):
        rng = np.random.default_rng(7)
        m = SparseColumnMatrix.from_dense(rng.random((6, 6)) * (rng.random((6, 6)) < 0.5))
        r = m.to_rows()
        dense_c, dense_r = m.to_dense(), r.to_scipy().toarray()
        assert dense_c.tobytes() == dense_r.tobytes()

    def test_negative_entries_rejected(self):
        with pytest.raises(ValueError):
            SparseColumnMatrix.from_dense([[0.0, -1.0], [1.0, 0.0]])


class TestComplete:
    def test_chain(self):
        out = complete_graph(EdgeList(3, [(0, 1), (1, 2)]), seed=11)
        added = out.edges[2:]
        assert len(added) == 2
        (s1, d1), (s2, d2) = added
        assert s1 == 2 and d1 in (0, 1)
        assert d2 == 0 and s2 in (1, 2)
        m = build_stochastic(out)
        assert np.all(m.out_degree() > 0) and np.all(m.in_degree() > 0)

    def test_two_cycle_unchanged(self):
        e = EdgeList(2, [(0, 1), (1, 0)])
        assert complete_graph(e, seed=5) == e

    def test_single_edge_becomes_two_cycle(self):
        out = complete_graph(EdgeList(2, [(0, 1)]), seed=0)
        # outgoing fix (1 -> 0) first, then incoming fix for node 0 from node 1
        assert out.edges == [(0, 1), (1, 0), (1, 0)]
        assert build_stochastic(out).triplets() == [(0, 1, 1.0), (1, 0, 1.0)]

    def test_needs_two_nodes(self):
        with pytest.raises(CompletionError):
            complete_graph(EdgeList(1, []), seed=0)

    def test_draws_follow_splitmix(self):
        # dangling nodes 3 and 4 draw first, then sources 0 and 1, one stream
        e = EdgeList(5, [(0, 2), (1, 2), (2, 3), (2, 4)])
        rng = SplitMix64(99)
        expected = [(3, rng.other_than(3, 5)), (4, rng.other_than(4, 5)),
                    (rng.other_than(0, 5), 0), (rng.other_than(1, 5), 1)]
        assert complete_graph(e, 99).edges[4:] == expected

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 40), st.integers(0, 2**32), st.integers(0, 2**64 - 1))
    def test_no_empty_rows_or_columns(self, n, gseed, seed):
        rng = np.random.default_rng(gseed)
        e = EdgeList(n, random_edges(rng, n, int(rng.integers(0, 2 * n))))
        out = complete_graph(e, seed)
        m = build_stochastic(out)
        assert np.all(m.out_degree() > 0)
        assert np.all(m.in_degree() > 0)
        assert all(s != d for s, d in out.edges[len(e.edges):])
        assert complete_graph(e, seed) == out


def brute_force_sources(m):
    dense = m.to_dense() != 0
    in_set = np.zeros(m.n, dtype=bool)
    while True:
        grown = in_set.copy()
        for i in range(m.n):
            in_nbrs = np.flatnonzero(dense[i])
            if all(in_set[j] and j != i for j in in_nbrs):
                grown[i] = True
        if np.array_equal(grown, in_set):
            return in_set
        in_set = grown


class TestStats:
    def test_chain(self):
        s = compute_stats(build_stochastic(EdgeList(3, [(0, 1), (1, 2)])))
        assert (s.L, s.D, s.E, s.O, s.max_in, s.max_out) == (2, 1, 3, 0, 1, 1)

    def test_two_cycle(self):
        s = compute_stats(build_stochastic(EdgeList(2, [(0, 1), (1, 0)])))
        assert (s.L, s.D, s.E, s.O, s.max_in, s.max_out) == (2, 0, 0, 0, 1, 1)

    def test_self_loop(self):
        s = compute_stats(build_stochastic(EdgeList(1, [(0, 0)])))
        assert (s.L, s.D, s.E, s.O) == (1, 0, 0, 1)

    def test_self_loop_blocks_recursion(self):
        # 0 -> 1, 1 -> 1, 1 -> 2: node 1 is looped so neither it nor 2 qualify
        m = build_stochastic(EdgeList(3, [(0, 1), (1, 1), (1, 2)]))
        assert list(recursive_sources(m)) == [True, False, False]

    @settings(max_examples=80, deadline=None)
    @given(st.integers(1, 50), st.integers(0, 2**32), st.floats(0.0, 3.0))
    def test_recursive_count_matches_brute_force(self, n, seed, deg):
        rng = np.random.default_rng(seed)
        m = build_stochastic(EdgeList(n, random_edges(rng, n, int(deg * n))))
        assert np.array_equal(recursive_sources(m), brute_force_sources(m))

    def test_bounds(self):
        rng = np.random.default_rng(3)
        m = build_stochastic(EdgeList(30, random_edges(rng, 30, 80)))
        s = compute_stats(m)
        assert s.L == m.nnz
        assert 0 <= s.D <= 30 and 0 <= s.E <= 30 and 0 <= s.O <= 30
        assert s.max_in <= 30 and s.max_out <= 30


class TestClosedClasses:
    def test_cycle(self):
        assert closed_class_count(build_stochastic(EdgeList(3, [(0, 1), (1, 2), (2, 0)]))) == 1

    def test_transient_feeding_one_class(self):
        assert closed_class_count(build_stochastic(EdgeList(3, [(0, 1), (1, 2), (2, 1)]))) == 1

    def test_dangling_node_is_closed(self):
        assert closed_class_count(build_stochastic(EdgeList(2, [(0, 1)]))) == 1

    def test_two_sinks(self):
        assert closed_class_count(build_stochastic(EdgeList(3, [(0, 1), (0, 2)]))) == 2

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 30), st.integers(0, 2**32), st.floats(0.0, 3.0))
    def test_matches_reachability(self, n, seed, deg):
        # closed classes = classes reachable from their members only
        rng = np.random.default_rng(seed)
        m = build_stochastic(EdgeList(n, random_edges(rng, n, int(deg * n))))
        a = (m.to_dense() != 0).T | np.eye(n, dtype=bool)  # a[i, j]: i -> j
        reach = a.copy()
        for k in range(n):
            reach |= reach[:, [k]] & reach[[k], :]
        closed = [i for i in range(n) if np.all(reach[reach[i]][:, i])]
        reps = {tuple(np.flatnonzero(reach[i] & reach[:, i])) for i in closed}
        assert closed_class_count(m) == len(reps)
