"""The bundled 24-trial stimulus set (12 easy/hard pairs).

These scenes are a reconstruction from verbal descriptions of the original
photographed stimuli (towers, lines, enclosures, bridges between towers,
colour-sorted builds, and the bucket trials).  Coordinates are ours and are
NOT the original stimuli.  Within each pair both members use the same
blocks; the hard member is the more precarious or more demanding build.
"""

from __future__ import annotations

from pathlib import Path

from .scene import (Block, BucketTemplate, Scene, ScatterTemplate, TrialSpec, load_trials,
                    sample_bucket_trial, sample_scattered_state, save_trials)

NOTE = ("Reconstructed stimulus set, not the original stimuli: coordinates were "
        "designed to mirror the described easy/hard pairs.")
DATA_FILE = Path(__file__).with_name("data") / "stimuli" / "suite.json"

CUBE = (1.0, 1.0, 1.0)
PLANK = (3.0, 1.0, 0.5)

# scattered blocks lie in this rectangle, left of the build site
SCATTER_ORIGIN = (-13.0, -6.0)
SCATTER_SIZE = (10.0, 12.0)


def _scene(specs) -> Scene:
    """``specs``: (x, y, z, dims, color) tuples; ids are assigned in order."""
    return Scene(tuple(Block(f"b{k}", dims, (x, y, z), 0.0, color)
                       for k, (x, y, z, dims, color) in enumerate(specs)))


def _cube(x, y, z, color="natural"):
    return (x, y, z, CUBE, color)


def _state_a(scene: Scene, pair: int):
    """Random scatter for all-cube scenes.

    Scenes with planks get a fixed A instead: the cubes from one scatter draw
    (seeded by the pair number) and the planks laid in a row beyond them.
    """
    cubes = [b for b in scene.blocks if b.dims == CUBE]
    others = [b for b in scene.blocks if b.dims != CUBE]
    template = ScatterTemplate(len(cubes), tuple(b.color for b in cubes),
                               SCATTER_SIZE, SCATTER_ORIGIN, CUBE)
    if not others:
        return template
    drawn = sample_scattered_state(template, pair)
    blocks = [b.moved_to(d.position, d.yaw) for b, d in zip(cubes, drawn.blocks)]
    x0, y0 = SCATTER_ORIGIN
    for k, b in enumerate(others):
        blocks.append(b.moved_to((x0 + 0.5 * b.dims[0], y0 - 1.5 - 1.5 * k, 0.5 * b.dims[2]), 0.0))
    return Scene(tuple(blocks))


def _line(n, y=0.0, color="natural"):
    return [_cube(float(i), y, 0.5, color) for i in range(n)]


def _tower(n, xs=None, x0=0.0, y=0.0, color="natural"):
    xs = xs or [0.0] * n
    return [_cube(x0 + xs[i], y, 0.5 + i, color) for i in range(n)]


def _ring8(x0=0.0, y0=0.0, pitch=1.0):
    cells = [(i, j) for i in range(3) for j in range(3) if (i, j) != (1, 1)]
    return [_cube(x0 + pitch * i, y0 + pitch * j, 0.5) for i, j in cells]


def _pairs():
    pairs = []

    # 1: three cubes in a row vs a three-step cantilever staircase
    pairs.append((_line(3), _tower(3, [0.0, 0.28, 0.56])))

    # 2: a 2x2 pad vs a zig-zag column of four
    pad = [_cube(0, 0, 0.5), _cube(1, 0, 0.5), _cube(0, 1, 0.5), _cube(1, 1, 0.5)]
    pairs.append((pad, _tower(4, [0.0, 0.33, 0.0, 0.33])))

    # 3: 3+2 pyramid vs a five-high column leaning one way
    pyramid = _line(3) + [_cube(0.5, 0, 1.5), _cube(1.5, 0, 1.5)]
    pairs.append((pyramid, _tower(5, [0.0, 0.15, 0.3, 0.45, 0.6])))

    # 4: two towers of three beside a plank vs the plank bridging them
    towers = _tower(3, x0=0.0) + _tower(3, x0=2.0)
    pairs.append((towers + [(1.0, 2.0, 0.25, PLANK, "natural")],
                  towers + [(1.0, 0.0, 3.25, PLANK, "natural")]))

    # 5: loose pieces vs a see-saw (plank on a two-cube post, a cube on each end)
    pairs.append(([_cube(0, 0, 0.5), _cube(1, 0, 0.5), _cube(2, 0, 0.5), _cube(3, 0, 0.5),
                   (1.5, 1.5, 0.25, PLANK, "natural")],
                  [_cube(0, 0, 0.5), _cube(0, 0, 1.5), _cube(-1.0, 0, 3.0), _cube(1.0, 0, 3.0),
                   (0.0, 0.0, 2.25, PLANK, "natural")]))

    # 6: a closed ring of eight vs four spaced posts spanned by two bridging
    #    cubes, each carrying one more cube
    spaced = [_cube(0, 0, 0.5), _cube(1.6, 0, 0.5), _cube(0, 1.6, 0.5), _cube(1.6, 1.6, 0.5)]
    roof = [_cube(0.8, 0, 1.5), _cube(0.8, 1.6, 1.5), _cube(0.8, 0, 2.5), _cube(0.8, 1.6, 2.5)]
    pairs.append((_ring8(), spaced + roof))

    # 7: ten cubes in a line vs a ten-cube tower
    pairs.append((_line(10), _tower(10)))

    # 8: three short towers vs one six-high column with small offsets
    pairs.append((_tower(2, x0=0) + _tower(2, x0=2) + _tower(2, x0=4),
                  _tower(6, [0.0, 0.15, -0.05, 0.2, 0.0, 0.25])))

    # 9: posts, a cube and a plank lying about vs a table whose top carries a
    #    cube out on each end
    pairs.append((_tower(2, x0=0.0) + _tower(2, x0=2.0) + [_cube(4.0, 0, 0.5), _cube(5.0, 0, 0.5),
                                                           (1.0, 2.0, 0.25, PLANK, "natural")],
                  _tower(2, x0=0.0) + _tower(2, x0=1.2) + [_cube(-0.2, 0, 3.0), _cube(2.2, 0, 3.0),
                                                           (1.0, 0.0, 2.25, PLANK, "natural")]))

    # 10: sort eight coloured cubes into two short rows vs two columns
    pairs.append(([_cube(float(i), 0, 0.5, "red") for i in range(4)]
                  + [_cube(float(i), 1.5, 0.5, "blue") for i in range(4)],
                  _tower(4, [0.0, 0.1, 0.2, 0.3], x0=0.0, color="red")
                  + _tower(4, [0.0, -0.1, -0.2, -0.3], x0=2.0, color="blue")))

    # 11: green and yellow cubes: a two-colour wall vs the same wall checkered
    wall_e = ([_cube(float(i), 0, 0.5, "green") for i in range(4)]
              + [_cube(float(i), 0, 1.5, "yellow") for i in range(4)])
    wall_h = [_cube(float(i), 0, 0.5 + j, "green" if (i + j) % 2 == 0 else "yellow")
              for j in range(2) for i in range(4)]
    pairs.append((wall_e, wall_h))
    return pairs


def build_suite() -> list[TrialSpec]:
    """The 24 trials, ids ``"1-E"``, ``"1-H"``, ... ``"12-H"``."""
    trials = []
    for k, (easy, hard) in enumerate(_pairs(), start=1):
        for tag, specs in (("E", easy), ("H", hard)):
            b = _scene(specs)
            trials.append(TrialSpec(f"{k}-{tag}", _state_a(b, k), b))
    for tag, variant in (("E", "easy"), ("H", "hard")):
        t = TrialSpec(f"12-{tag}", BucketTemplate(variant), _bucket_b(variant))
        trials.append(t)
    return trials


def _bucket_b(variant: str) -> Scene:
    return sample_bucket_trial(variant, 0).state_b


def write_suite(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_trials(build_suite(), path, note=NOTE)
    return path


def load_suite() -> list[TrialSpec]:
    """The bundled set as shipped with the package."""
    return load_trials(DATA_FILE)
