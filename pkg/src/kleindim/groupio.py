"""Reading and writing group-definition files.

A group definition is one JSON document:

    {
      "name": "schottky_f2",
      "model_dimension": 2,
      "chart": "disc",
      "generators": [
        [[re, im], [re, im], [re, im], [re, im]],
        ...
      ]
    }

Each generator is a 2x2 complex matrix given row-major as four [re, im]
pairs (a, b, c, d).  Matrices must have unit determinant within 1e-6; they
are renormalized exactly on load.  Charts: planar groups may be given in
"disc" form directly or as real "halfspace" (upper half-plane) matrices,
which are conjugated to the disc by the fixed Cayley matrix; spatial groups
(model 3) use the "halfspace" chart natively.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import UsageError
from .geometry import MoebiusMap
from .group import GroupPresentation

# Cayley matrix for the half-plane -> disc conjugation; the overall scale
# cancels in the conjugation, so the raw integer form is fine.
_CAYLEY = np.array([[1.0, -1.0j], [1.0, 1.0j]])
_CAYLEY_INV = np.array([[0.5, 0.5], [0.5j, -0.5j]])


def halfplane_to_disc(m):
    """Conjugate an SL(2, R) half-plane matrix into disc-preserving form."""
    m = np.asarray(m, dtype=complex)
    out = _CAYLEY @ m @ _CAYLEY_INV
    return MoebiusMap.from_matrix(out, model=2)


def _atomic_write_text(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def save_group(presentation, path):
    """Write a presentation in its native chart (disc for 2, halfspace for 3)."""
    gens = []
    for g in presentation.generators:
        gens.append([[v.real, v.imag] for v in (g.a, g.b, g.c, g.d)])
    doc = {
        "name": presentation.name,
        "model_dimension": presentation.model,
        "chart": "disc" if presentation.model == 2 else "halfspace",
        "generators": gens,
    }
    _atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


def load_group(path):
    """Read and validate a group-definition file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as err:
        raise UsageError(f"cannot read group file {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise UsageError(f"group file {path} is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise UsageError("group file must hold one JSON object")

    name = doc.get("name", "")
    model = doc.get("model_dimension")
    chart = doc.get("chart")
    gens_raw = doc.get("generators")
    if model not in (2, 3):
        raise UsageError(f"model_dimension must be 2 or 3, got {model!r}")
    if chart not in ("disc", "halfspace"):
        raise UsageError(f"chart must be 'disc' or 'halfspace', got {chart!r}")
    if model == 3 and chart == "disc":
        raise UsageError("spatial groups (model 3) are stored in the halfspace chart")
    if not isinstance(gens_raw, list) or not gens_raw:
        raise UsageError("generators must be a nonempty list")

    mats = []
    for idx, entry in enumerate(gens_raw):
        arr = np.asarray(entry, dtype=float)
        if arr.shape != (4, 2):
            raise UsageError(f"generator {idx} must be four [re, im] pairs, got shape {arr.shape}")
        vals = arr[:, 0] + 1j * arr[:, 1]
        det = vals[0] * vals[3] - vals[1] * vals[2]
        if abs(det - 1.0) > 1e-6:
            raise UsageError(
                f"generator {idx} determinant {det:.8g} is not 1 within 1e-6"
            )
        mats.append(vals.reshape(2, 2))

    if model == 2 and chart == "halfspace":
        gens = [halfplane_to_disc(m) for m in mats]
    else:
        gens = [MoebiusMap.from_matrix(m, model=model) for m in mats]
    return GroupPresentation(gens, model=model, name=name)
