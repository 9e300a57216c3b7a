import json

import numpy as np
import pytest

from treepsdo.io import (ConfigError, FormatError, RunConfig, dumps, fmt_float, generator,
                         random_decomposition, random_functions, read_decomposition, read_kernel,
                         read_spectral, read_tree_function, write_decomposition, write_kernel,
                         write_spectral, write_tree_function)

from conftest import geometry


def test_config_defaults():
    c = RunConfig()
    assert (c.q, c.R, c.D, c.M, c.seed, c.out) == (2, 4, 4, 256, 42, "reports")
    assert c.header == "# q=2,R=4,D=4,M=256"


@pytest.mark.parametrize("kw", [{"q": 1}, {"R": 0}, {"R": 3, "D": 2}, {"R": 3, "D": 4},
                                {"M": 1}, {"seed": -1}, {"seed": 2**64}, {"q": 2.5},
                                {"tolerances": {"roundtrip": -1}}])
def test_config_rejects(kw):
    with pytest.raises(ConfigError):
        RunConfig(**kw)


def test_config_text_and_overrides(tmp_path):
    text = "# sweep\nq = 3\nR=2\nM=64 # nodes\ntol.roundtrip=1e-9\nout=somewhere\n"
    c = RunConfig.from_text(text)
    assert (c.q, c.R, c.D, c.M, c.out) == (3, 2, 2, 64, "somewhere")
    assert c.tol("roundtrip", 1.0) == 1e-9 and c.tol("trace", 0.5) == 0.5
    path = tmp_path / "run.cfg"
    path.write_text(text)
    c = RunConfig.from_file(path, M=128, tolerances={"trace": 1e-3}, seed=None)
    assert c.M == 128 and c.seed == 42
    assert c.tolerances == {"roundtrip": 1e-9, "trace": 1e-3}
    for bad in ("q", "q=two", "colour=red", "tol.x=abc"):
        with pytest.raises(ConfigError):
            RunConfig.from_text(bad)


def test_generator_streams():
    a = generator(42, "roundtrip").standard_normal(5)
    b = generator(42, "roundtrip").standard_normal(5)
    c = generator(42, "trace").standard_normal(5)
    d = generator(43, "roundtrip").standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c) and not np.array_equal(a, d)
    f = random_functions(generator(1, "x"), 3, 4)
    z = generator(1, "x").standard_normal((3, 4, 2))
    np.testing.assert_array_equal(f, z[..., 0] + 1j * z[..., 1])
    dec = random_decomposition(generator(1, "y"), 2, 4)
    assert dec.f.shape == dec.g.shape == (2, 4)


def test_generator_is_pcg64_with_crc32_spawn_key():
    import zlib
    ss = np.random.SeedSequence(42, spawn_key=(zlib.crc32(b"layer-cake"),))
    ref = np.random.Generator(np.random.PCG64(ss)).random(3)
    np.testing.assert_array_equal(generator(42, "layer-cake").random(3), ref)


def test_dumps_is_deterministic_and_valid_json():
    obj = {"b": 0.1, "a": [1, 2.5, complex(1, -2)], "c": None, "d": True, "e": np.float64(1 / 3),
           "f": np.arange(3), "g": {"z": 1, "y": "s"}}
    s = dumps(obj)
    assert s == dumps(dict(reversed(list(obj.items()))))
    assert s.startswith('{"a":[1,2.5,[1,-2]],"b":0.10000000000000001')
    back = json.loads(s)
    assert back["e"] == 1 / 3
    assert fmt_float(float("nan")) == "NaN" and fmt_float(-np.inf) == "-Infinity"
    with pytest.raises(TypeError):
        dumps(object())


def test_tree_function_roundtrip(tmp_path):
    f = random_functions(generator(0, "f"), 1, 22)[0]
    p = tmp_path / "f.json"
    write_tree_function(p, f, 2, 3)
    np.testing.assert_array_equal(read_tree_function(p, 2, 3, 22), f)
    with pytest.raises(FormatError):
        read_tree_function(p, 2, 4, 94)
    p.write_text('{"format": "tree-function", "q": 2, "R": 3, "values": {"1": [2, 0]}}')
    np.testing.assert_array_equal(read_tree_function(p, 2, 3, 22), 2 * np.eye(22)[1])
    for bad in ('{"format": "tree-function", "q": 2, "R": 3, "values": {"99": [1, 0]}}',
                '{"format": "tree-function", "q": 2, "R": 3, "values": {"1": 5}}',
                '{"format": "kernel", "q": 2, "R": 3}', "not json"):
        p.write_text(bad)
        with pytest.raises(FormatError):
            read_tree_function(p, 2, 3, 22)


def test_decomposition_roundtrip(tmp_path):
    dec = random_decomposition(generator(0, "d"), 3, 22)
    p = tmp_path / "d.json"
    write_decomposition(p, dec, 2, 3)
    back = read_decomposition(p, 2, 3, 22)
    np.testing.assert_array_equal(back.f, dec.f)
    np.testing.assert_array_equal(back.g, dec.g)
    p.write_text('{"format": "nuclear-decomposition", "q": 2, "R": 3, "pairs": []}')
    assert len(read_decomposition(p, 2, 3, 22)) == 0
    p.write_text('{"format": "nuclear-decomposition", "q": 2, "R": 3, "pairs": [{"f": {}}]}')
    with pytest.raises(FormatError):
        read_decomposition(p, 2, 3, 22)


def test_kernel_and_spectral_roundtrip(tmp_path):
    cfg = RunConfig(q=2, R=3, M=16)
    ball, part, grid = geometry(2, 3, 16)
    rng = generator(0, "k")
    K = random_functions(rng, 22, 22)
    p = tmp_path / "k.csv"
    write_kernel(p, K, cfg)
    lines = p.read_text().splitlines()
    assert lines[0] == "# q=2,R=3,D=3,M=16" and lines[1] == "row,col,re,im"
    assert len(lines) == 2 + 22 * 22
    np.testing.assert_array_equal(read_kernel(p, cfg, 22), K)
    with pytest.raises(FormatError):
        read_kernel(p, RunConfig(q=2, R=3, M=32), 22)

    F = random_functions(rng, part.n_cylinders, grid.M)
    p = tmp_path / "s.csv"
    write_spectral(p, F, grid, cfg)
    assert p.read_text().splitlines()[1] == "cylinder,node,s,re,im"
    np.testing.assert_array_equal(read_spectral(p, cfg, part.n_cylinders), F)
    p.write_text("\n".join(p.read_text().splitlines()[:-1]) + "\n")
    with pytest.raises(FormatError):
        read_spectral(p, cfg, part.n_cylinders)
