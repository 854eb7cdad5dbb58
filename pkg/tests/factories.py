"""
Model builders shared by the tests.
"""
import numpy as np

from bmfl.models.operators import ModelSpec
from bmfl.services.model_service import model_service


def onsite_model(modes: int, hopping: float, U: float, geometry: str = "chain", potential=None,
                 name: str = "test") -> ModelSpec:
    """Bose-Hubbard style model built through the model-file path."""
    doc = {
        "name": name,
        "modes": modes,
        "geometry": geometry,
        "hopping": hopping,
        "two_body": {"kind": "onsite", "U": U},
    }
    if potential is not None:
        doc["external_potential"] = list(potential)
    return model_service.parse_model(doc)


def random_dense_model(modes: int, rng: np.random.Generator, name: str = "random") -> ModelSpec:
    """Model with random hermitian T and exchange-symmetric hermitian w."""
    t = rng.standard_normal((modes, modes)) + 1j * rng.standard_normal((modes, modes))
    t = 0.5 * (t + t.conj().T)
    w = rng.standard_normal((modes ** 2, modes ** 2)) + 1j * rng.standard_normal((modes ** 2, modes ** 2))
    w = 0.5 * (w + w.conj().T)
    swap = np.zeros((modes ** 2, modes ** 2))
    for i in range(modes):
        for j in range(modes):
            swap[i * modes + j, j * modes + i] = 1.0
    w = 0.5 * (w + swap @ w @ swap)

    def pairs(m):
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]

    return model_service.parse_model({
        "name": name,
        "modes": modes,
        "one_body": pairs(t),
        "two_body": {"kind": "dense", "matrix": pairs(w)},
    })
