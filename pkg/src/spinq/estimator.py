"""Simulated Hadamard-test estimation of circuit amplitudes.

A circuit whose gates are each proportional to a unitary is rescaled to a
unitary circuit ``U`` with ``C = scale * U``. The "quantum computer" is
simulated: the exact amplitude ``a = <L|U|R>`` is computed densely and the
Hadamard test is sampled from its outcome distribution,
``P(0) = (1 + Re a) / 2`` for the real part and ``P(0) = (1 + Im a) / 2`` for
the phase-shifted test. Each component estimate is ``2 (f0 - 1/2)`` with
plug-in standard error ``2 sqrt(f0 (1 - f0) / samples)``.

Random numbers come from PCG64 streams spawned from ``SeedSequence(seed)``:
child 0 drives the real-part test, child 1 the imaginary-part test. Uniforms
are drawn in fixed blocks, so a report is bit-reproducible from
``(circuit, samples, seed)``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .circuit import DEFAULT_MAX_WIDTH, Circuit, check_width, amplitude, basis_index
from .errors import BadParameters, NonUnitaryRegime, PeriodicUnsupported

DEFAULT_TOL = 1e-9
_BLOCK = 1 << 20


@dataclass(frozen=True, eq=False)
class UnitaryDecomposition:
    circuit: Circuit
    scale: complex
    per_gate_scales: tuple


@dataclass(frozen=True)
class EstimatorReport:
    estimate: complex
    stderr_re: float
    stderr_im: float
    samples: int
    seed: int
    scale: complex
    z_estimate: complex

    def to_dict(self) -> dict:
        return asdict(self)


def normalize_to_unitary(circuit: Circuit, tol: float = DEFAULT_TOL) -> UnitaryDecomposition:
    """Divide each gate by its largest singular value and require the result to be unitary.

    Raises ``NonUnitaryRegime`` naming the first gate (layer, position) whose
    rescaled residual ``max |W^dag W - I|`` exceeds ``tol``.
    """
    scales, layers = [], []
    flat = 0
    for li, layer in enumerate(circuit.layers):
        new_layer = []
        for gi, g in enumerate(layer):
            if g.diagonal:
                s = float(np.max(np.abs(np.diag(g.matrix))))
            else:
                s = float(np.linalg.norm(g.matrix, 2))
            if s == 0.0:
                raise NonUnitaryRegime(f"gate {flat} (layer {li}) is zero", layer=li, gate=gi, index=flat,
                                       residual=1.0)
            w = g.matrix / s
            residual = float(np.max(np.abs(w.conj().T @ w - np.eye(w.shape[0]))))
            if residual > tol:
                raise NonUnitaryRegime(
                    f"gate {flat} (layer {li}, position {gi}, targets {g.targets}) is not proportional "
                    f"to a unitary: residual {residual:.3g} after rescaling",
                    layer=li, gate=gi, index=flat, residual=residual)
            scales.append(s)
            new_layer.append(g.scaled(1.0 / s))
            flat += 1
        layers.append(new_layer)
    total = 1.0
    for s in scales:
        total *= s
    return UnitaryDecomposition(circuit.with_layers(layers), complex(total), tuple(scales))


def boundary_vectors(circuit: Circuit):
    """Normalized ``(left, right)`` vectors and the norm factor folded into the scale."""
    q, w = circuit.q, circuit.width
    dim = q ** w
    b = circuit.boundary
    if b.kind == "periodic":
        raise PeriodicUnsupported("trace estimation is not supported; use fixed or open boundaries")
    if b.kind == "fixed":
        left = np.zeros(dim, dtype=np.complex128)
        right = np.zeros(dim, dtype=np.complex128)
        left[basis_index(b.left, q)] = 1.0
        right[basis_index(b.right, q)] = 1.0
        return left, right, 1.0
    cap = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
    return cap, cap, float(dim)


def _count_zeros(rng: np.random.Generator, p0: float, samples: int) -> int:
    zeros = 0
    remaining = samples
    while remaining > 0:
        m = min(remaining, _BLOCK)
        zeros += int(np.count_nonzero(rng.random(m) < p0))
        remaining -= m
    return zeros


def sample_component(rng: np.random.Generator, value: float, samples: int):
    """One Hadamard test with ``<Z> = value``: returns (estimate, stderr)."""
    p0 = min(1.0, max(0.0, (1.0 + value) / 2.0))
    f0 = _count_zeros(rng, p0, samples) / samples
    return 2.0 * (f0 - 0.5), 2.0 * float(np.sqrt(f0 * (1.0 - f0) / samples))


def hadamard_estimate(dec: UnitaryDecomposition, samples: int, seed: int,
                      max_width: int = DEFAULT_MAX_WIDTH) -> EstimatorReport:
    if samples < 1:
        raise BadParameters("samples must be >= 1")
    if seed < 0 or seed >= 2 ** 64:
        raise BadParameters("seed must be a 64-bit unsigned integer")
    left, right, norm = boundary_vectors(dec.circuit)
    check_width(dec.circuit, max_width)
    a = amplitude(dec.circuit, left, right)
    streams = [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(2)]
    re, se_re = sample_component(streams[0], a.real, samples)
    im, se_im = sample_component(streams[1], a.imag, samples)
    scale = dec.scale * norm
    est = complex(re, im)
    return EstimatorReport(est, se_re, se_im, int(samples), int(seed), complex(scale), scale * est)


def estimate_partition_function(lattice, samples: int, seed: int, tol: float = DEFAULT_TOL,
                                max_width: int = DEFAULT_MAX_WIDTH) -> EstimatorReport:
    """Lattice (anything with ``to_circuit``) or circuit -> unitary rescaling -> Hadamard estimate."""
    circuit = lattice if isinstance(lattice, Circuit) else lattice.to_circuit()
    return hadamard_estimate(normalize_to_unitary(circuit, tol), samples, seed, max_width)
