"""Builders for the bundled model fixtures.

The fixtures are synthetic layer DAGs that mimic the topology and tensor
sizes of well known image models. Memory per layer is float32 weights plus
the float32 output activation. ``python -m edgeslice.zoo`` rewrites the JSON
files shipped in ``edgeslice/data``.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

from .model_graph import Layer, ModelGraph, load_model_graph

FIXTURES = ("chain", "diamond", "resnet50_like", "inception_resnet_v2_like", "nasnet_like")

# Element count of the ResNet50 input image as reported for the original model;
# note 3 * 224 * 224 would be 150528.
RESNET50_INPUT_ELEMENTS = 150328
RESNET50_OUTPUT_ELEMENTS = 1000


class _Builder:
    def __init__(self, name):
        self.name = name
        self.layers: list[Layer] = []
        self.edges: list[tuple[str, str]] = []

    def add(self, lid, elements, params=0, inputs=()):
        self.layers.append(Layer(lid, int(elements), int(4 * params + 4 * elements)))
        for src in inputs:
            self.edges.append((src, lid))
        return lid

    def chain(self, prefix, start, specs):
        """Append a sequence of (elements, params) layers after ``start``."""
        prev = start
        for i, (elements, params) in enumerate(specs):
            prev = self.add(f"{prefix}_{i}", elements, params, [prev])
        return prev

    def build(self, fragment=False):
        return ModelGraph.from_records(self.layers, self.edges, name=self.name, fragment=fragment)


def chain_model(n=3) -> ModelGraph:
    b = _Builder(f"chain{n}")
    prev = None
    for i in range(n):
        lid = chr(ord("a") + i) if n <= 26 else f"l{i}"
        b.add(lid, 1000 * (n - i), 1000, [prev] if prev else [])
        prev = lid
    return b.build()


def diamond_model() -> ModelGraph:
    b = _Builder("diamond")
    b.add("a", 4000, 0)
    b.add("b", 2000, 1000, ["a"])
    b.add("c", 2000, 1000, ["a"])
    b.add("d", 1000, 1000, ["b", "c"])
    return b.build()


def resnet50_like() -> ModelGraph:
    """ResNet50 topology: conv stem then 16 bottleneck blocks (diamonds)."""
    b = _Builder("resnet50_like")
    x = b.add("input", RESNET50_INPUT_ELEMENTS)
    x = b.add("conv1", 112 * 112 * 64, 7 * 7 * 3 * 64, [x])
    x = b.add("pool1", 56 * 56 * 64, 0, [x])
    in_ch = 64
    stages = [(3, 64, 256, 56), (4, 128, 512, 28), (6, 256, 1024, 14), (3, 512, 2048, 7)]
    for s, (blocks, mid, out, hw) in enumerate(stages, start=2):
        for k in range(blocks):
            p = f"s{s}b{k}"
            a = b.add(f"{p}_conv_a", hw * hw * mid, in_ch * mid, [x])
            c = b.add(f"{p}_conv_b", hw * hw * mid, 9 * mid * mid, [a])
            c = b.add(f"{p}_conv_c", hw * hw * out, mid * out, [c])
            if k == 0:
                short = b.add(f"{p}_proj", hw * hw * out, in_ch * out, [x])
            else:
                short = x
            x = b.add(f"{p}_add", hw * hw * out, 0, [c, short])
            in_ch = out
    x = b.add("avg_pool", 2048, 0, [x])
    b.add("predictions", RESNET50_OUTPUT_ELEMENTS, 2048 * 1000 + 1000, [x])
    return b.build()


def _branchy_block(b, prefix, x, branches, merge_elements, merge_params=0):
    """Parallel branches from ``x`` merged by a concatenation layer."""
    ends = [b.chain(f"{prefix}_br{i}", x, spec) for i, spec in enumerate(branches)]
    return b.add(f"{prefix}_concat", merge_elements, merge_params, ends)


def _residual_block(b, prefix, x, branches, concat_elements, channels, hw, concat_channels):
    cat = _branchy_block(b, prefix, x, branches, concat_elements)
    up = b.add(f"{prefix}_up", hw * hw * channels, concat_channels * channels, [cat])
    return b.add(f"{prefix}_add", hw * hw * channels, 0, [x, up])


def inception_resnet_v2_like() -> ModelGraph:
    """InceptionResNetV2 topology: stem, 10/20/10 residual inception blocks, two reductions."""
    b = _Builder("inception_resnet_v2_like")
    x = b.add("input", 299 * 299 * 3)
    stem = [
        (149 * 149 * 32, 3 * 3 * 3 * 32),
        (147 * 147 * 32, 9 * 32 * 32),
        (147 * 147 * 64, 9 * 32 * 64),
        (73 * 73 * 64, 0),
        (73 * 73 * 80, 64 * 80),
        (71 * 71 * 192, 9 * 80 * 192),
        (35 * 35 * 192, 0),
    ]
    x = b.chain("stem", x, stem)

    hw = 35
    a = hw * hw
    x = _branchy_block(
        b, "mixed_5b", x,
        [
            [(a * 96, 192 * 96)],
            [(a * 48, 192 * 48), (a * 64, 25 * 48 * 64)],
            [(a * 64, 192 * 64), (a * 96, 9 * 64 * 96), (a * 96, 9 * 96 * 96)],
            [(a * 192, 0), (a * 64, 192 * 64)],
        ],
        a * 320,
    )
    for k in range(10):
        x = _residual_block(
            b, f"block35_{k}", x,
            [
                [(a * 32, 320 * 32)],
                [(a * 32, 320 * 32), (a * 32, 9 * 32 * 32)],
                [(a * 32, 320 * 32), (a * 48, 9 * 32 * 48), (a * 64, 9 * 48 * 64)],
            ],
            a * 128, 320, hw, 128,
        )

    hw = 17
    a = hw * hw
    x = _branchy_block(
        b, "mixed_6a", x,
        [
            [(a * 384, 9 * 320 * 384)],
            [(35 * 35 * 256, 320 * 256), (35 * 35 * 256, 9 * 256 * 256), (a * 384, 9 * 256 * 384)],
            [(a * 320, 0)],
        ],
        a * 1088,
    )
    for k in range(20):
        x = _residual_block(
            b, f"block17_{k}", x,
            [
                [(a * 192, 1088 * 192)],
                [(a * 128, 1088 * 128), (a * 160, 7 * 128 * 160), (a * 192, 7 * 160 * 192)],
            ],
            a * 384, 1088, hw, 384,
        )

    hw = 8
    a = hw * hw
    x = _branchy_block(
        b, "mixed_7a", x,
        [
            [(17 * 17 * 256, 1088 * 256), (a * 384, 9 * 256 * 384)],
            [(17 * 17 * 256, 1088 * 256), (a * 288, 9 * 256 * 288)],
            [(17 * 17 * 256, 1088 * 256), (17 * 17 * 288, 9 * 256 * 288), (a * 320, 9 * 288 * 320)],
            [(a * 1088, 0)],
        ],
        a * 2080,
    )
    for k in range(10):
        x = _residual_block(
            b, f"block8_{k}", x,
            [
                [(a * 192, 2080 * 192)],
                [(a * 192, 2080 * 192), (a * 224, 3 * 192 * 224), (a * 256, 3 * 224 * 256)],
            ],
            a * 448, 2080, hw, 448,
        )
    x = b.add("conv_7b", a * 1536, 2080 * 1536, [x])
    x = b.add("avg_pool", 1536, 0, [x])
    b.add("predictions", 1000, 1536 * 1000 + 1000, [x])
    return b.build()


def nasnet_like(cells=6) -> ModelGraph:
    """Portion of a NASNet-style DAG: two hidden-state streams, cross-linked every cell.

    Each cell consumes both previous hidden states, so every depth level holds
    at least two layers and the portion ends in two terminal states.
    """
    bld = _Builder("nasnet_like")
    hw, ch = 42, 168
    size = hw * hw * ch
    bld.add("input", 331 * 331 * 3)
    h_prev = bld.add("stem_conv_left", 165 * 165 * 96, 27 * 96, ["input"])
    h_cur = bld.add("stem_conv_right", 165 * 165 * 96, 27 * 96, ["input"])
    for i in range(cells):
        sep_l = bld.add(f"cell{i}_sep_left", size, 9 * ch + ch * ch, [h_prev])
        sep_r = bld.add(f"cell{i}_sep_right", size, 25 * ch + ch * ch, [h_cur])
        pool = bld.add(f"cell{i}_pool", size, 0, [h_prev])
        comb_a = bld.add(f"cell{i}_comb_a", size, 0, [sep_l, sep_r])
        comb_b = bld.add(f"cell{i}_comb_b", size, 0, [pool, sep_r])
        h_prev, h_cur = comb_a, bld.add(f"cell{i}_concat", size * 2, 0, [comb_b, h_cur])
    return bld.build(fragment=True)


BUILDERS = {
    "chain": chain_model,
    "diamond": diamond_model,
    "resnet50_like": resnet50_like,
    "inception_resnet_v2_like": inception_resnet_v2_like,
    "nasnet_like": nasnet_like,
}


def fixture_path(name: str) -> Path:
    if name not in BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return Path(str(resources.files("edgeslice") / "data" / f"{name}.json"))


def load_fixture(name: str) -> ModelGraph:
    return load_model_graph(fixture_path(name))


def resolve_model(spec: str) -> ModelGraph:
    """Load a model by fixture name or by file path."""
    if spec in BUILDERS:
        return load_fixture(spec)
    return load_model_graph(spec)


def write_fixtures(directory=None) -> list[Path]:
    out = Path(directory) if directory else Path(__file__).parent / "data"
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in FIXTURES:
        path = out / f"{name}.json"
        BUILDERS[name]().save(path)
        written.append(path)
    return written


if __name__ == "__main__":
    for p in write_fixtures(sys.argv[1] if len(sys.argv) > 1 else None):
        print(p)
