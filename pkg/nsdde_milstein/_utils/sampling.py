"""Sample designs for the sampled assumption checks.

Each state of a sample lies in the ball of radius R. Random draws come from
separate Philox streams per component, so asking for more samples with the same
seed only appends to the earlier sample.
"""

from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

PERTURBATION_SIZES = (1e-3, 1e-1)


class StateSample(NamedTuple):
    """Points (x, y, w): current state x, delayed state y and the twice delayed
    state w consumed by sigma2_sigma. Arrays have shape (samples, n).
    """

    x: np.ndarray
    y: np.ndarray
    w: np.ndarray

    def take(self, index) -> "StateSample":
        return StateSample(self.x[index], self.y[index], self.w[index])

    def __len__(self) -> int:
        return self.x.shape[0]


def _stream(seed: int, level: int, component: int) -> np.random.Generator:
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, level, component]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _unit_rows(normals: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(normals, axis=-1, keepdims=True)
    return normals / np.where(norms > 0, norms, 1.0)


def _ball(
    dim: int, radius: float, count: int, seed: int, level: int, component: int
) -> np.ndarray:
    directions = _unit_rows(
        _stream(seed, level, 2 * component).standard_normal((count, dim))
    )
    radial = _stream(seed, level, 2 * component + 1).random(count) ** (1.0 / dim)
    return directions * (radius * radial)[:, np.newaxis]


def axis_points(dim: int, radius: float) -> Tuple[np.ndarray, np.ndarray]:
    """The origin and the pairs (x, y) with x and/or y on a coordinate axis at
    distance R, which carry the extremes of polynomial coefficients.
    """
    xs: List[np.ndarray] = [np.zeros(dim)]
    ys: List[np.ndarray] = [np.zeros(dim)]
    for axis in range(dim):
        for sign in (1.0, -1.0):
            point = np.zeros(dim)
            point[axis] = sign * radius
            xs.extend([point, np.zeros(dim), point])
            ys.extend([np.zeros(dim), point, point])
    return np.array(xs), np.array(ys)


def sample_states(
    dim: int, radius: float, samples: int, seed: int, level: int = 0
) -> StateSample:
    """Axis points followed by `samples` independent uniform draws in the ball."""
    fixed_x, fixed_y = axis_points(dim, radius)
    return StateSample(
        x=np.concatenate([fixed_x, _ball(dim, radius, samples, seed, level, 0)]),
        y=np.concatenate([fixed_y, _ball(dim, radius, samples, seed, level, 1)]),
        w=np.concatenate(
            [np.zeros_like(fixed_x), _ball(dim, radius, samples, seed, level, 2)]
        ),
    )


def sample_ladder(
    dim: int, radii: Sequence[float], samples: int, seed: int
) -> List[StateSample]:
    """Nested samples: the sample at radii[i] is the union of the single-radius
    samples at radii[0..i].
    """
    nested = []
    pieces: List[StateSample] = []
    for level, radius in enumerate(radii):
        pieces.append(sample_states(dim, radius, samples, seed, level))
        nested.append(
            StateSample(*(np.concatenate(parts) for parts in zip(*pieces)))
        )
    return nested


def _perturb(values: np.ndarray, step: np.ndarray, radius: float) -> np.ndarray:
    moved = values + step
    outside = np.linalg.norm(moved, axis=-1) > radius
    moved[outside] = values[outside] - step[outside]
    norms = np.linalg.norm(moved, axis=-1)
    still_outside = norms > radius
    moved[still_outside] *= (radius / norms[still_outside])[:, np.newaxis]
    return moved


def sample_pairs(
    states: StateSample, radius: float, seed: int, level: int = 0
) -> Tuple[StateSample, StateSample]:
    """Pairs of points in the ball for difference quotients: consecutive points,
    then every point against its perturbations of size 1e-3 and 1e-1 along x only,
    y only and both.
    """
    count, dim = states.x.shape
    directions = _stream(seed, level, 99).standard_normal((count, 2 * dim))
    dir_x = _unit_rows(directions[:, :dim])
    dir_y = _unit_rows(directions[:, dim:])

    firsts = [states.take(slice(0, count - 1))]
    seconds = [states.take(slice(1, count))]
    for size in PERTURBATION_SIZES:
        for move_x, move_y in ((1.0, 0.0), (0.0, 1.0), (2 ** -0.5, 2 ** -0.5)):
            firsts.append(states)
            seconds.append(
                StateSample(
                    x=_perturb(states.x, size * move_x * dir_x, radius),
                    y=_perturb(states.y, size * move_y * dir_y, radius),
                    w=states.w,
                )
            )
    return (
        StateSample(*(np.concatenate(parts) for parts in zip(*firsts))),
        StateSample(*(np.concatenate(parts) for parts in zip(*seconds))),
    )
