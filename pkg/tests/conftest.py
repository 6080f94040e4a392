"""Shared fixtures: small phantoms sized for fast tests, plus a one-time
kernel warmup so JIT compilation never lands inside a timed assertion."""

import numpy as np
import pytest

from chestseg import DepthSequence, PhantomSpec, generate_phantom
from chestseg.breathing import extract_breathing_signal
from chestseg.config import PipelineConfig
from chestseg.pipeline import segment_sequence


def small_phantom_spec(**overrides):
    """A quarter-scale scene (160x120, 60 s) that keeps full-pipeline
    tests around a second instead of half a minute."""
    base = dict(
        width=160, height=120, fps=10.0, duration_s=60.0,
        body_center=(80.0, 60.0), body_axes=(45.0, 28.0),
        chest_center=(60.0, 57.0), chest_axes=(16.0, 15.0),
    )
    base.update(overrides)
    return PhantomSpec(**base)


def iou(a, b):
    union = (a | b).sum()
    return (a & b).sum() / union if union else 1.0


def recall(mask, truth):
    return (mask & truth).sum() / truth.sum()


def precision(mask, truth):
    area = mask.sum()
    return (mask & truth).sum() / area if area else 0.0


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile-before-you-time: run the pipeline once on a tiny scene."""
    spec = small_phantom_spec(width=64, height=48, duration_s=30.0,
                              body_center=(32.0, 24.0), body_axes=(18.0, 11.0),
                              chest_center=(26.0, 23.0), chest_axes=(7.0, 6.0))
    seq, truth = generate_phantom(spec, seed=0)
    segment_sequence(seq, PipelineConfig(median_radius=3))
    extract_breathing_signal(seq, truth.chest_mask, median_radius=3)


@pytest.fixture(scope="session")
def small_run(warm_kernels):
    """(sequence, truth, config, result) for the stock small phantom."""
    spec = small_phantom_spec()
    seq, truth = generate_phantom(spec, seed=0)
    cfg = PipelineConfig()
    result = segment_sequence(seq, cfg)
    return seq, truth, cfg, result


@pytest.fixture(scope="session")
def clean_small_sequence():
    """Noise-free small phantom (no pepper, flicker, or radial noise)."""
    spec = small_phantom_spec(pepper_prob=0.0, radial_noise_gain_mm=0.0,
                              edge_flicker_mm=0.0)
    seq, truth = generate_phantom(spec, seed=0)
    return seq, truth


def make_sequence(frames, fps=10.0):
    return DepthSequence(frames=np.asarray(frames, dtype=np.uint16), fps=fps)
