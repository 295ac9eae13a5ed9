import gzip
import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from texdim.errors import DomainError
from texdim.io import (
    extract_windows,
    ingest_images,
    load_point_cloud_csv,
    quantize,
    read_idx,
    read_pgm,
    read_png,
    to_grayscale,
    write_idx,
    write_pgm,
)
from texdim.pipeline import (
    FeatureConfig,
    feature_columns,
    feature_matrix,
    feature_rows,
    parse_fixture,
    parse_offsets,
    format_offsets,
    raw_window_vectors,
    subsample,
)
from texdim.texture import GlcmOffset, GrayImage


class TestPgm:
    @pytest.mark.parametrize("binary", [True, False])
    @pytest.mark.parametrize("maxval", [255, 1023, 65535])
    def test_round_trip(self, tmp_path, binary, maxval):
        arr = np.random.default_rng(maxval).integers(0, maxval + 1, (7, 5))
        write_pgm(tmp_path / "a.pgm", arr, maxval, binary)
        back, mv = read_pgm(tmp_path / "a.pgm")
        assert mv == maxval and np.array_equal(back, arr)

    def test_comments_in_header(self, tmp_path):
        (tmp_path / "c.pgm").write_bytes(b"P2\n# made by hand\n2 2\n# max\n3\n0 1\n2 3\n")
        arr, mv = read_pgm(tmp_path / "c.pgm")
        assert mv == 3 and arr.tolist() == [[0, 1], [2, 3]]

    def test_constant_image(self, tmp_path):
        write_pgm(tmp_path / "k.pgm", np.full((6, 6), 77))
        (_, img), = ingest_images(tmp_path / "k.pgm").images
        assert np.all(img.pixels == 77)

    @pytest.mark.parametrize(
        "data", [b"P6\n1 1\n255\n\x00", b"P5\n4 4\n255\n\x00\x01", b"P5\n1 1\n70000\n\x00\x00", b"P2\n2 1\n3\n0 9\n"]
    )
    def test_corrupt(self, tmp_path, data):
        (tmp_path / "x.pgm").write_bytes(data)
        with pytest.raises(DomainError):
            read_pgm(tmp_path / "x.pgm")


class TestPng:
    def test_rgb_luminance(self, tmp_path):
        rgb = np.zeros((2, 3, 3), dtype=np.uint8)
        rgb[0, 0] = (255, 0, 0)
        rgb[0, 1] = (0, 255, 0)
        rgb[0, 2] = (0, 0, 255)
        rgb[1] = (100, 100, 100)
        Image.fromarray(rgb, "RGB").save(tmp_path / "c.png")
        arr, mv = read_png(tmp_path / "c.png")
        assert mv == 255
        assert arr.tolist() == [[76, 150, 29], [100, 100, 100]]

    def test_gray_png(self, tmp_path):
        g = np.arange(12, dtype=np.uint8).reshape(3, 4)
        Image.fromarray(g, "L").save(tmp_path / "g.png")
        assert np.array_equal(read_png(tmp_path / "g.png")[0], g)

    def test_bad_shape(self):
        with pytest.raises(DomainError):
            to_grayscale(np.zeros((2, 2, 2)))


class TestIdx:
    def test_round_trip(self, tmp_path):
        imgs = np.random.default_rng(0).integers(0, 256, (5, 28, 28)).astype(np.uint8)
        write_idx(tmp_path / "t-ubyte", imgs)
        raw = (tmp_path / "t-ubyte").read_bytes()
        assert raw[:16] == struct.pack(">IIII", 0x803, 5, 28, 28)
        assert np.array_equal(read_idx(tmp_path / "t-ubyte"), imgs)

    def test_gzip(self, tmp_path):
        imgs = np.random.default_rng(1).integers(0, 256, (3, 4, 6)).astype(np.uint8)
        write_idx(tmp_path / "t-ubyte", imgs)
        (tmp_path / "t-ubyte.gz").write_bytes(gzip.compress((tmp_path / "t-ubyte").read_bytes()))
        assert np.array_equal(read_idx(tmp_path / "t-ubyte.gz"), imgs)

    def test_ingest_ids(self, tmp_path):
        write_idx(tmp_path / "m.idx", np.zeros((3, 4, 4), dtype=np.uint8))
        res = ingest_images(tmp_path / "m.idx")
        assert [i for i, _ in res.images] == ["m.idx#0", "m.idx#1", "m.idx#2"]

    def test_bad_magic(self, tmp_path):
        (tmp_path / "b.idx").write_bytes(struct.pack(">IIII", 0x801, 1, 1, 1) + b"\x00")
        with pytest.raises(DomainError, match="magic"):
            read_idx(tmp_path / "b.idx")

    def test_truncated(self, tmp_path):
        (tmp_path / "b.idx").write_bytes(struct.pack(">IIII", 0x803, 2, 2, 2) + b"\x00")
        with pytest.raises(DomainError, match="truncated"):
            read_idx(tmp_path / "b.idx")


class TestQuantize:
    def test_identity_when_levels_fit(self):
        a = np.array([[0, 7], [3, 5]])
        assert np.array_equal(quantize(a, 7, 8), a)
        assert np.array_equal(quantize(a, 7, 256), a)

    def test_bins(self):
        assert quantize(np.array([0, 63, 64, 127, 128, 255]), 255, 4).tolist() == [0, 0, 1, 1, 2, 3]
        assert quantize(np.array([0, 65535]), 65535, 256).tolist() == [0, 255]

    @given(arrays(np.int64, 30, elements=st.integers(0, 1000)), st.integers(2, 300))
    def test_range_and_order(self, a, kappa):
        q = quantize(a, 1000, kappa)
        assert q.min() >= 0 and q.max() < kappa
        order = np.argsort(a, kind="stable")
        assert np.all(np.diff(q[order]) >= 0)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            quantize(np.array([300]), 255, 16)


class TestWindows:
    @pytest.mark.parametrize("shape, n, stride, count", [((28, 28), 28, 1, 1), ((30, 30), 28, 1, 9), ((56, 28), 28, 28, 2)])
    def test_counts(self, shape, n, stride, count):
        img = GrayImage(np.zeros(shape, dtype=np.int64), 2)
        assert len(extract_windows(img, n, stride)) == count

    def test_row_major(self):
        img = GrayImage(np.arange(16).reshape(4, 4), 16)
        ps = extract_windows(img, 2, 2)
        assert ps.origins == [(0, 0), (0, 2), (2, 0), (2, 2)]
        assert ps.patches[1].pixels.tolist() == [[2, 3], [6, 7]]

    @pytest.mark.parametrize("n, stride", [(5, 1), (0, 1), (2, 0)])
    def test_errors(self, n, stride):
        with pytest.raises(DomainError):
            extract_windows(GrayImage(np.zeros((4, 4), dtype=np.int64), 2), n, stride)


class TestIngest:
    def test_directory_sorted_and_errors_collected(self, tmp_path):
        write_pgm(tmp_path / "b.pgm", np.ones((4, 4), dtype=int))
        write_pgm(tmp_path / "a.pgm", np.zeros((4, 4), dtype=int))
        (tmp_path / "c.pgm").write_bytes(b"garbage")
        (tmp_path / "notes.txt").write_text("ignored")
        res = ingest_images(tmp_path, kappa=8)
        assert [i for i, _ in res.images] == ["a.pgm", "b.pgm"]
        assert len(res.errors) == 1 and res.errors[0][0].endswith("c.pgm")
        with pytest.raises(DomainError, match="c.pgm"):
            ingest_images(tmp_path, kappa=8, strict=True)

    def test_quantized_to_kappa(self, tmp_path):
        write_pgm(tmp_path / "a.pgm", np.array([[0, 255], [128, 64]]))
        (_, img), = ingest_images(tmp_path / "a.pgm", kappa=4).images
        assert img.levels == 4 and img.pixels.tolist() == [[0, 3], [2, 1]]

    def test_missing(self, tmp_path):
        with pytest.raises(DomainError):
            ingest_images(tmp_path / "nope")


class TestCsv:
    def test_plain(self, tmp_path):
        (tmp_path / "p.csv").write_text("1,2\n3,4\n")
        assert load_point_cloud_csv(tmp_path / "p.csv").tolist() == [[1, 2], [3, 4]]

    def test_feature_header_skips_metadata(self, tmp_path):
        (tmp_path / "f.csv").write_text("dataset,image,row,col,asm,contrast,flag_correlation_degenerate\nd,i,0,0,0.5,2,1\n")
        assert load_point_cloud_csv(tmp_path / "f.csv").tolist() == [[0.5, 2.0]]

    def test_malformed(self, tmp_path):
        (tmp_path / "m.csv").write_text("1,2\n3,x\n")
        with pytest.raises(DomainError):
            load_point_cloud_csv(tmp_path / "m.csv")


class TestPipeline:
    def test_offsets_round_trip(self):
        offs = parse_offsets("0,1;1,-1s")
        assert offs == (GlcmOffset(0, 1), GlcmOffset(1, -1, True))
        assert format_offsets(offs) == "0,1;1,-1s"

    @pytest.mark.parametrize("text", ["", "1", "a,b"])
    def test_bad_offsets(self, text):
        with pytest.raises(DomainError):
            parse_offsets(text)

    def test_fixture_parse(self):
        assert parse_fixture("cube:5:50:2000") == (5, 50, 2000)
        with pytest.raises(DomainError):
            parse_fixture("ball:5:50")

    def test_rows_and_matrix(self, tmp_path, monkeypatch):
        rng = np.random.default_rng(2)
        for i in range(3):
            write_pgm(tmp_path / f"{i}.pgm", rng.integers(0, 256, (10, 12)))
        res = ingest_images(tmp_path, kappa=16)
        cfg = FeatureConfig(window=8, stride=2, kappa=16)
        rows = feature_rows(res, "d", cfg)
        assert len(rows) == 3 * 2 * 3
        assert list(rows[0]) == feature_columns(cfg)
        X = feature_matrix(rows, cfg)
        assert X.shape == (18, 13)
        monkeypatch.setenv("TEXDIM_THREADS", "3")
        assert feature_rows(res, "d", cfg) == rows
        assert raw_window_vectors(res, cfg).shape == (18, 64)

    def test_subsample(self):
        X = np.arange(20.0)[:, None]
        assert subsample(X, None, 0) is X
        s = subsample(X, 5, 1)
        assert s.shape == (5, 1) and np.all(np.diff(s[:, 0]) > 0)
        assert np.array_equal(s, subsample(X, 5, 1))
