import gzip

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adavr import (FiniteSumObjective, LOGISTIC, LabeledDataset, ParseError,
                   dumps_libsvm, load_libsvm, parse_libsvm, synth_classification)


class TestParse:
    def test_basic(self):
        ds, report = parse_libsvm("+1 1:0.5 3:2\n-1 2:1\n")
        assert ds.n == 2 and ds.d == 3
        idx, val = ds.row(0)
        np.testing.assert_array_equal(idx, [0, 2])
        np.testing.assert_array_equal(val, [0.5, 2.0])
        np.testing.assert_array_equal(ds.labels, [1.0, -1.0])
        assert not report.label_mapping_applied
        assert report.n_rows == 2 and report.n_features == 3

    def test_zero_one_labels_mapped(self):
        ds, report = parse_libsvm("0 1:1\n1 1:2\n")
        np.testing.assert_array_equal(ds.labels, [-1.0, 1.0])
        assert report.label_mapping_applied

    def test_one_two_labels_mapped(self):
        ds, report = parse_libsvm("1 1:1\n2 1:2\n")
        np.testing.assert_array_equal(ds.labels, [1.0, -1.0])
        assert report.label_mapping_applied

    def test_comments_and_blanks(self):
        text = "# header\n\n+1 1:1 # trailing\n# another\n-1 1:2\n"
        ds, report = parse_libsvm(text)
        assert ds.n == 2
        assert report.n_skipped_comments == 2

    def test_min_dim_override(self):
        ds, _ = parse_libsvm("+1 1:1\n", min_dim=10)
        assert ds.d == 10


class TestParseErrors:
    def test_non_increasing_indices(self):
        with pytest.raises(ParseError) as exc:
            parse_libsvm("+1 1:1\n+1 3:1 2:5\n")
        assert exc.value.line == 2
        assert "increasing" in str(exc.value)

    def test_malformed_token(self):
        with pytest.raises(ParseError) as exc:
            parse_libsvm("+1 1:1\n-1 2:abc\n")
        assert exc.value.line == 2

    def test_bad_label(self):
        with pytest.raises(ParseError) as exc:
            parse_libsvm("+1 1:1\nfoo 1:1\n")
        assert exc.value.line == 2

    def test_unknown_label_set(self):
        with pytest.raises(ParseError) as exc:
            parse_libsvm("0 1:1\n2 1:1\n")
        assert exc.value.line == 2
        assert "label set" in str(exc.value)

    def test_zero_index(self):
        with pytest.raises(ParseError) as exc:
            parse_libsvm("+1 0:1\n")
        assert exc.value.line == 1

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_libsvm("# only a comment\n")


class TestRoundTrip:
    def test_parse_dump_parse(self):
        text = "+1 1:0.5 3:-2.25\n-1 2:1e-3\n+1 1:7\n"
        ds, _ = parse_libsvm(text)
        ds2, _ = parse_libsvm(dumps_libsvm(ds))
        np.testing.assert_array_equal(ds.indptr, ds2.indptr)
        np.testing.assert_array_equal(ds.indices, ds2.indices)
        np.testing.assert_array_equal(ds.values, ds2.values)
        np.testing.assert_array_equal(ds.labels, ds2.labels)
        assert ds.d == ds2.d

    def test_synth_round_trip(self):
        ds = synth_classification(13, 4, seed=3)
        ds2, _ = parse_libsvm(dumps_libsvm(ds))
        np.testing.assert_array_equal(ds.values, ds2.values)
        np.testing.assert_array_equal(ds.labels, ds2.labels)

    def test_gzip(self, tmp_path):
        path = tmp_path / "tiny.libsvm.gz"
        with gzip.open(path, "wt") as fh:
            fh.write("+1 1:1\n-1 2:0.5\n")
        ds, _ = load_libsvm(path)
        assert ds.n == 2 and ds.d == 2


@st.composite
def sparse_datasets(draw):
    d = draw(st.integers(1, 6))
    n = draw(st.integers(1, 8))
    rows, labels = [], []
    value = st.floats(-1e6, 1e6).filter(lambda v: v != 0.0)
    for _ in range(n):
        cols = draw(st.sets(st.integers(0, d - 1), max_size=d))
        rows.append([(j, draw(value)) for j in sorted(cols)])
        labels.append(draw(st.sampled_from([-1.0, 1.0])))
    return LabeledDataset.from_rows(rows, labels, d=d)


@settings(max_examples=100, deadline=None)
@given(sparse_datasets())
def test_round_trip_property(ds):
    ds2, _ = parse_libsvm(dumps_libsvm(ds), min_dim=ds.d)
    np.testing.assert_array_equal(ds.indptr, ds2.indptr)
    np.testing.assert_array_equal(ds.indices, ds2.indices)
    np.testing.assert_array_equal(ds.values, ds2.values)
    np.testing.assert_array_equal(ds.labels, ds2.labels)
    assert ds.d == ds2.d


class TestSynth:
    def test_single_example(self):
        ds = synth_classification(1, 1, seed=0)
        assert ds.n == 1 and ds.labels[0] in (-1.0, 1.0)

    def test_deterministic(self):
        a = synth_classification(30, 6, seed=42)
        b = synth_classification(30, 6, seed=42)
        np.testing.assert_array_equal(a.values, b.values)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_unit_rows(self):
        ds = synth_classification(50, 8, seed=1)
        np.testing.assert_allclose(ds.row_norms_sq(), 1.0, rtol=1e-12)

    def test_separable_enough_for_logistic_fit(self):
        from adavr import Ball, reference_solution

        ds = synth_classification(200, 10, seed=11)
        obj = FiniteSumObjective(ds, LOGISTIC, 1.0 / 200)
        ball = Ball(np.zeros(10), 100.0)
        ref = reference_solution(obj, ball, None, tol=1e-6)
        scores = np.array([ds.row(i)[1] @ ref.x_star[ds.row(i)[0]] for i in range(ds.n)])
        accuracy = np.mean(np.sign(scores) == ds.labels)
        assert accuracy >= 0.9
