"""JSON and binary interchange formats.

JSON schema (all complex numbers are ``[re, im]`` pairs, positions are arrays
of floats):

* grid:    ``{"dim", "n1", "fov", "wavelength", "depth"}``
* layout:  ``{"grid", "kind", "positions": [[x, y], ...]}``
* sketches: ``{"seed", "quant_bits", "phases": [[...]],
  "alphas": [[[re, im], ...], ...]}`` (phases are authoritative on load)
* scene:   ``{"grid", "values": [...], "vignette": [...] | null,
  "sparsity", "support"}``
* measurement record: ``{"raw": [...], "debiased": [...],
  "noise": {"kind", "scale"}, "epsilon", "mode", "seed"}``

Binary complex-matrix format (little endian): header ``u32 order`` then
``u32 dtype_tag`` (1 = complex128), payload ``order * order`` row-major
``[re, im]`` float64 pairs.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .grid import Grid, make_grid
from .layout import CoreLayout, _build_layout
from .scene import SceneImage
from .sensing import MeasurementRecord, NoiseModel
from .sketch import SketchBatch

DTYPE_TAG_COMPLEX128 = 1


# -- JSON ------------------------------------------------------------------


def _complex_pairs(arr: np.ndarray):
    stacked = np.stack([arr.real, arr.imag], axis=-1)
    return stacked.tolist()


def grid_to_dict(grid: Grid) -> dict:
    return {
        "dim": grid.dim,
        "n1": grid.n1,
        "fov": grid.fov,
        "wavelength": grid.wavelength,
        "depth": grid.depth,
    }


def grid_from_dict(data: dict) -> Grid:
    return make_grid(**data)


def layout_to_json(layout: CoreLayout) -> str:
    return json.dumps(
        {
            "grid": grid_to_dict(layout.grid),
            "kind": layout.kind,
            "positions": layout.positions.tolist(),
        }
    )


def layout_from_json(text: str) -> CoreLayout:
    data = json.loads(text)
    grid = grid_from_dict(data["grid"])
    return _build_layout(grid, np.asarray(data["positions"]), kind=data["kind"])


def sketches_to_json(batch: SketchBatch) -> str:
    return json.dumps(
        {
            "seed": batch.seed,
            "quant_bits": batch.quant_bits,
            "phases": batch.phases.tolist(),
            "alphas": _complex_pairs(batch.alphas),
        }
    )


def sketches_from_json(text: str) -> SketchBatch:
    data = json.loads(text)
    if "phases" in data:
        phases = np.asarray(data["phases"], dtype=np.float64)
    else:
        pairs = np.asarray(data["alphas"], dtype=np.float64)
        phases = np.angle(pairs[..., 0] + 1j * pairs[..., 1])
    return SketchBatch(
        phases=phases, seed=data.get("seed"), quant_bits=data.get("quant_bits")
    )


def scene_to_json(scene: SceneImage) -> str:
    return json.dumps(
        {
            "grid": grid_to_dict(scene.grid),
            "values": scene.values.ravel().tolist(),
            "vignette": None
            if scene.vignette is None
            else scene.vignette.ravel().tolist(),
            "sparsity": scene.sparsity,
            "support": None if scene.support is None else scene.support.tolist(),
        }
    )


def scene_from_json(text: str) -> SceneImage:
    data = json.loads(text)
    grid = grid_from_dict(data["grid"])
    vignette = data.get("vignette")
    support = data.get("support")
    return SceneImage(
        grid=grid,
        values=np.asarray(data["values"], dtype=np.float64).reshape(grid.shape),
        vignette=None
        if vignette is None
        else np.asarray(vignette, dtype=np.float64).reshape(grid.shape),
        sparsity=data.get("sparsity"),
        support=None if support is None else np.asarray(support, dtype=np.int64),
    )


def record_to_json(record: MeasurementRecord) -> str:
    return json.dumps(
        {
            "raw": record.raw.tolist(),
            "debiased": record.debiased.tolist(),
            "noise": {"kind": record.noise.kind, "scale": record.noise.scale},
            "epsilon": record.epsilon,
            "mode": record.mode,
            "seed": record.seed,
        }
    )


def record_from_json(text: str) -> MeasurementRecord:
    data = json.loads(text)
    return MeasurementRecord(
        raw=np.asarray(data["raw"], dtype=np.float64),
        debiased=np.asarray(data["debiased"], dtype=np.float64),
        noise=NoiseModel(**data["noise"]),
        epsilon=data["epsilon"],
        mode=data["mode"],
        seed=data.get("seed"),
    )


# -- binary complex matrices -------------------------------------------------


def write_complex_matrix(path, matrix: np.ndarray):
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("binary format holds square matrices only")
    order = matrix.shape[0]
    interleaved = np.empty((order, order, 2))
    interleaved[..., 0] = matrix.real
    interleaved[..., 1] = matrix.imag
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", order, DTYPE_TAG_COMPLEX128))
        fh.write(interleaved.astype("<f8").tobytes())


def read_complex_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        order, tag = struct.unpack("<II", fh.read(8))
        if tag != DTYPE_TAG_COMPLEX128:
            raise ValueError(f"unknown dtype tag {tag}")
        payload = np.frombuffer(fh.read(order * order * 16), dtype="<f8")
    payload = payload.reshape(order, order, 2)
    return payload[..., 0] + 1j * payload[..., 1]


def write_float_array(path, values: np.ndarray):
    """Flat float64 payload (frames, images); shape goes in a JSON manifest."""
    with open(path, "wb") as fh:
        fh.write(np.asarray(values, dtype="<f8").ravel().tobytes())


def read_float_array(path, shape) -> np.ndarray:
    with open(path, "rb") as fh:
        data = np.frombuffer(fh.read(), dtype="<f8")
    return data.reshape(shape)


def save_fringe_stack(stack, out_dir) -> str:
    """Write one flat float array per frame plus a JSON manifest.

    Returns the manifest path. Frames are named ``fringe_q<core>_k<step>.f64``
    and the reference-only frame ``reference.f64``.
    """
    import os

    os.makedirs(out_dir, exist_ok=True)
    q_count, n_steps = stack.frames.shape[0], stack.frames.shape[1]
    frame_files = []
    for q in range(q_count):
        for k in range(n_steps):
            name = f"fringe_q{q:03d}_k{k}.f64"
            write_float_array(os.path.join(out_dir, name), stack.frames[q, k])
            frame_files.append(name)
    write_float_array(os.path.join(out_dir, "reference.f64"), stack.reference_frame)
    manifest = {
        "grid": grid_to_dict(stack.grid),
        "cores": q_count,
        "phase_steps": n_steps,
        "frame_shape": list(stack.grid.shape),
        "frames": frame_files,
        "reference": "reference.f64",
    }
    path = os.path.join(out_dir, "fringes.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
    return path


def load_fringe_stack(manifest_path):
    import os

    from .calibration import FringeStack

    with open(manifest_path) as fh:
        manifest = json.load(fh)
    grid = grid_from_dict(manifest["grid"])
    base = os.path.dirname(manifest_path)
    shape = tuple(manifest["frame_shape"])
    frames = np.stack(
        [read_float_array(os.path.join(base, f), shape) for f in manifest["frames"]]
    ).reshape((manifest["cores"], manifest["phase_steps"]) + shape)
    reference = read_float_array(os.path.join(base, manifest["reference"]), shape)
    return FringeStack(grid=grid, frames=frames, reference_frame=reference)


# -- portable graymap --------------------------------------------------------


def write_pgm(path, image: np.ndarray):
    """8-bit portable graymap, image rescaled to its own min/max."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ValueError("PGM export needs a 2-D image")
    lo, hi = image.min(), image.max()
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    pixels = np.round((image - lo) * scale).astype(np.uint8)
    header = f"P5\n{image.shape[1]} {image.shape[0]}\n255\n".encode()
    with open(path, "wb") as fh:
        fh.write(header + pixels.tobytes())
