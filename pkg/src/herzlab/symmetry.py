"""Parity labels for real and imaginary parts, their product/convolution calculus,
field-level symmetry checks, and the exhaustive closure search.

A part label is a 3-bit mask: bit ``s-1`` set means the part is odd in ``xi_s``,
clear means even, so the monomial ``xi^a`` carries mask ``a``.  ``None`` marks a
part that vanishes identically; it is compatible with every parity.  The
``NO_SYMMETRY`` sentinel is absorbing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from herzlab.spectral import ScalarField, SpectralField

XI1, XI2, XI3 = 0b001, 0b010, 0b100
AXIS_BITS = (XI1, XI2, XI3)


class _NoSymmetry:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NO_SYMMETRY"

    def __reduce__(self):
        return (_NoSymmetry, ())


NO_SYMMETRY = _NoSymmetry()

PartLabel = "int | None | _NoSymmetry"


def part_mul(x, y):
    if x is NO_SYMMETRY or y is NO_SYMMETRY:
        return NO_SYMMETRY
    if x is None or y is None:
        return None
    return x ^ y


def part_add(x, y):
    """Label of a sum: proper only when both summands share the label."""
    if x is NO_SYMMETRY or y is NO_SYMMETRY:
        return NO_SYMMETRY
    if x is None:
        return y
    if y is None:
        return x
    return x if x == y else NO_SYMMETRY


def part_sum(*xs):
    out = None
    for x in xs:
        out = part_add(out, x)
    return out


def monomial_text(bits) -> str:
    if bits is None:
        return "0"
    if bits is NO_SYMMETRY:
        return "?"
    if bits == 0:
        return "1"
    return "".join(f"ξ{s + 1}" for s in range(3) if bits >> s & 1)


def monomial_bits(*axes: int) -> int:
    """Mask of ``xi_{a1} xi_{a2} ...`` (axes 1-based, repeated axes cancel)."""
    bits = 0
    for a in axes:
        bits ^= AXIS_BITS[a - 1]
    return bits


@dataclass(frozen=True)
class ParityLabel:
    """``T f = T xi^alpha + i T xi^beta`` for ``f = a + i b``."""

    alpha: int | None
    beta: int | None

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if v is not None and not (isinstance(v, (int, np.integer)) and 0 <= v < 8):
                raise ValueError(f"{name} must be a 3-bit mask or None, got {v!r}")

    @classmethod
    def real(cls, *axes: int) -> ParityLabel:
        """Label of the real monomial ``xi_{axes}``."""
        return cls(monomial_bits(*axes), None)

    @classmethod
    def parse(cls, text: str) -> ParityLabel:
        """Inverse of :meth:`bits`: ``"011|100"`` with ``-`` for a vanishing part."""
        a, b = text.split("|")
        conv = lambda s: None if set(s) == {"-"} else sum(int(c) << i for i, c in enumerate(s))
        return cls(conv(a), conv(b))

    def bits(self) -> str:
        """Six-bit serialization ``a1a2a3|b1b2b3``."""
        conv = lambda v: "---" if v is None else "".join(str(v >> i & 1) for i in range(3))
        return f"{conv(self.alpha)}|{conv(self.beta)}"

    def __str__(self):
        if self.alpha is None and self.beta is None:
            return "0"
        if self.beta is None:
            return f"T({monomial_text(self.alpha)})"
        if self.alpha is None:
            return f"iT({monomial_text(self.beta)})"
        return f"T({monomial_text(self.alpha)}) + iT({monomial_text(self.beta)})"


ONE = ParityLabel(0, None)
I_UNIT = ParityLabel(None, 0)


def _complex(real, imag):
    if real is NO_SYMMETRY or imag is NO_SYMMETRY:
        return NO_SYMMETRY
    return ParityLabel(real, imag)


def label_multiply(x, y):
    """Label of a pointwise product; parities add mod 2 part by part.

    ``(a + ib)(c + id)`` has real part ``ac - bd`` and imaginary part ``ad + bc``;
    each gets a proper label only if its two contributions agree.
    """
    if x is NO_SYMMETRY or y is NO_SYMMETRY:
        return NO_SYMMETRY
    real = part_add(part_mul(x.alpha, y.alpha), part_mul(x.beta, y.beta))
    imag = part_add(part_mul(x.alpha, y.beta), part_mul(x.beta, y.alpha))
    return _complex(real, imag)


def label_convolve(x, y):
    """Label of ``f * g``; reflections commute with convolution, so the algebra is
    the same as for products."""
    return label_multiply(x, y)


def label_add(x, y):
    if x is NO_SYMMETRY or y is NO_SYMMETRY:
        return NO_SYMMETRY
    return _complex(part_add(x.alpha, y.alpha), part_add(x.beta, y.beta))


@dataclass(frozen=True)
class VectorLabel:
    components: tuple[ParityLabel, ParityLabel, ParityLabel]

    def __post_init__(self):
        if len(self.components) != 3:
            raise ValueError("a vector label has three components")

    def __getitem__(self, k: int) -> ParityLabel:
        """Component ``k`` in {1, 2, 3}."""
        return self.components[k - 1]

    def bits(self) -> str:
        return " ".join(c.bits() for c in self.components)

    @classmethod
    def parse(cls, text: str) -> VectorLabel:
        return cls(tuple(ParityLabel.parse(t) for t in text.split()))

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def _x2_component(k: int) -> ParityLabel:
    others = [a for a in (1, 2, 3) if a != k]
    return ParityLabel(monomial_bits(*others), monomial_bits(k))


X2_LABEL = VectorLabel(tuple(_x2_component(k) for k in (1, 2, 3)))
X2_IMAGINARY_LABEL = VectorLabel(tuple(ParityLabel(None, monomial_bits(k)) for k in (1, 2, 3)))

_COUNTEREXAMPLE_MONOMIALS = (monomial_bits(2), monomial_bits(1), monomial_bits(1, 2, 3))


def counterexample_labels() -> dict:
    """The three-antisymmetry counterexample ``(T xi2, T xi1, T xi1xi2xi3)`` under the
    readings considered: as labels of the real parts (imaginary parts vanishing),
    as labels of the imaginary parts, and as real-part labels with imaginary parts
    carrying no symmetry."""
    return {
        "real": VectorLabel(tuple(ParityLabel(m, None) for m in _COUNTEREXAMPLE_MONOMIALS)),
        "imaginary": VectorLabel(tuple(ParityLabel(None, m) for m in _COUNTEREXAMPLE_MONOMIALS)),
        "real_generic_imaginary": NO_SYMMETRY,
    }


# -- symbolic Picard update --------------------------------------------------


def divergence_label(l1, l2):
    """Label forced on the third component by ``u3 = -(xi1 u1 + xi2 u2) / xi3``.

    ``1/xi3`` is odd in ``xi3`` only, so it carries the mask of ``xi3``.
    """
    t1 = label_multiply(ParityLabel.real(1, 3), l1)
    t2 = label_multiply(ParityLabel.real(2, 3), l2)
    return label_add(t1, t2)


def is_divergence_compatible(l) -> bool:
    if l is NO_SYMMETRY or any(c is NO_SYMMETRY for c in l.components):
        return False
    return divergence_label(l[1], l[2]) == l[3]


def nonlinearity_label_map(l):
    """Label of the bilinear part of one Picard update, or ``NO_SYMMETRY``.

    The real and imaginary parts of ``i A_k`` and ``-i xi_k A_0 / |xi|^2`` are
    assembled from the convolution labels of ``a_l = Re u_l`` and ``b_l = Im u_l``
    (the split ``A_{k,1}, A_{k,2}, A_{0,1..4}``).  ``|xi|^2`` and the heat kernel are
    even in every variable, and overall signs do not affect parity.
    """
    if l is NO_SYMMETRY or any(c is NO_SYMMETRY for c in l.components):
        return NO_SYMMETRY
    if not is_divergence_compatible(l):
        raise ValueError(f"label {l} is not compatible with the divergence constraint")
    a = [c.alpha for c in l.components]
    b = [c.beta for c in l.components]
    xi = AXIS_BITS
    r = range(3)

    def mono(bits, x):
        return part_mul(bits, x)

    A_k1 = [part_sum(*(mono(xi[m], part_add(part_mul(a[m], b[k]), part_mul(b[m], a[k]))) for m in r)) for k in r]
    A_k2 = [part_sum(*(mono(xi[m], part_add(part_mul(a[m], a[k]), part_mul(b[m], b[k]))) for m in r)) for k in r]
    pairs = list(itertools.product(r, r))
    A_01 = part_sum(*(mono(xi[m] ^ xi[n], part_mul(a[m], b[n])) for m, n in pairs))
    A_02 = part_sum(*(mono(xi[m] ^ xi[n], part_mul(b[m], a[n])) for m, n in pairs))
    A_03 = part_sum(*(mono(xi[m] ^ xi[n], part_mul(a[m], a[n])) for m, n in pairs))
    A_04 = part_sum(*(mono(xi[m] ^ xi[n], part_mul(b[m], b[n])) for m, n in pairs))
    im_A0 = part_add(A_01, A_02)
    re_A0 = part_add(A_03, A_04)
    out = []
    for k in r:
        real = part_add(A_k1[k], mono(xi[k], im_A0))
        imag = part_add(A_k2[k], mono(xi[k], re_A0))
        c = _complex(real, imag)
        if c is NO_SYMMETRY:
            return NO_SYMMETRY
        out.append(c)
    return VectorLabel(tuple(out))


def update_label(l):
    """Label of a full update: heat flow of data labelled ``l`` plus its bilinear part."""
    image = nonlinearity_label_map(l)
    if image is NO_SYMMETRY:
        return NO_SYMMETRY
    comps = [label_add(x, y) for x, y in zip(l.components, image.components)]
    if any(c is NO_SYMMETRY for c in comps):
        return NO_SYMMETRY
    return VectorLabel(tuple(comps))


@dataclass(frozen=True)
class ClosureRow:
    label: object
    image: object
    fixed: bool


def _component_labels(include_degenerate: bool):
    parts = list(range(8))
    if include_degenerate:
        parts = [None] + parts
    for alpha, beta in itertools.product(parts, parts):
        if alpha is None and beta is None:
            continue
        yield ParityLabel(alpha, beta)


def closure_table(include_degenerate: bool = False) -> list[ClosureRow]:
    """Push every divergence-compatible label through one Picard update.

    Components 1 and 2 range over all 64 labels (81 with vanishing parts when
    ``include_degenerate``); component 3 is forced by the divergence constraint.
    A label is fixed when the update reproduces it.
    """
    comps = list(_component_labels(include_degenerate))
    rows = []
    for l1, l2 in itertools.product(comps, comps):
        l3 = divergence_label(l1, l2)
        if l3 is NO_SYMMETRY:
            rows.append(ClosureRow(VectorLabel((l1, l2, ParityLabel(None, None))), NO_SYMMETRY, False))
            continue
        vec = VectorLabel((l1, l2, l3))
        image = nonlinearity_label_map(vec)
        rows.append(ClosureRow(vec, image, update_label(vec) == vec))
    return rows


def closure_search(include_degenerate: bool = False) -> list[VectorLabel]:
    """Labels preserved by the Picard update, in enumeration order."""
    return [row.label for row in closure_table(include_degenerate) if row.fixed]


# -- field-level checks ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymmetryCheckReport:
    """Worst relative residuals; for label checks ``residuals[c, s]`` is component
    ``c``, axis ``s``."""

    residuals: np.ndarray
    tol: float

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def _scale(values: np.ndarray) -> float:
    m = float(np.max(np.abs(values)))
    return m if m > 0 else 1.0


def _part_axis_residual(part: np.ndarray, bits, axis: int, scale: float) -> float:
    """Residual of ``part(R_s xi) = (-1)^bit part(xi)`` along spatial ``axis`` (0..2)."""
    if bits is None:
        return float(np.max(np.abs(part))) / scale
    sign = -1.0 if bits >> axis & 1 else 1.0
    flipped = np.flip(part, axis=part.ndim - 3 + axis)
    return float(np.max(np.abs(flipped - sign * part))) / scale


def label_residuals(values: np.ndarray, label, scale: float) -> np.ndarray:
    """Per-axis residuals of one scalar array against one label."""
    if label is NO_SYMMETRY:
        return np.zeros(3)
    out = np.zeros(3)
    for s in range(3):
        out[s] = max(
            _part_axis_residual(values.real, label.alpha, s, scale),
            _part_axis_residual(values.imag, label.beta, s, scale),
        )
    return out


def check_field_label(u: SpectralField, l: VectorLabel, tol: float = 1e-12) -> SymmetryCheckReport:
    """Compare reflected values ``u_c(R_s xi)`` with ``(-1)^{alpha_s} Re u_c`` and
    ``(-1)^{beta_s} Im u_c``; residuals are relative to the field's largest
    amplitude."""
    scale = _scale(u.data)
    res = np.stack([label_residuals(u.data[c], l.components[c], scale) for c in range(3)])
    return SymmetryCheckReport(res, tol)


def check_trajectory_label(fields: np.ndarray, l: VectorLabel) -> float:
    """Worst residual over a stack ``(T, 3, n, n, n)``, each slice normalized by its
    own maximum."""
    worst = 0.0
    for f in fields:
        scale = _scale(f)
        for c in range(3):
            worst = max(worst, float(np.max(label_residuals(f[c], l.components[c], scale))))
    return worst


def swap12(values: np.ndarray) -> np.ndarray:
    """``f(xi2, xi1, xi3)`` for arrays with trailing spatial axes."""
    return np.swapaxes(values, -3, -2)


def x1_residual(data: np.ndarray) -> float:
    """``max |u1(xi1, xi2, xi3) - u2(xi2, xi1, xi3)|`` relative to the field maximum."""
    scale = _scale(data)
    return float(np.max(np.abs(data[..., 0, :, :, :] - swap12(data[..., 1, :, :, :])))) / scale


def check_x1(u: SpectralField, tol: float = 1e-12) -> SymmetryCheckReport:
    return SymmetryCheckReport(np.array([x1_residual(u.data)]), tol)


def measure_label(f: ScalarField, tol: float = 1e-10):
    """Empirical label of a scalar field: per part and axis, whichever of even/odd
    holds within ``tol`` (relative to ``max |f|``); ``NO_SYMMETRY`` if neither does."""
    values = f.values
    scale = _scale(values)
    parts = []
    for part in (np.real(values), np.imag(values)):
        if np.max(np.abs(part)) <= tol * scale:
            parts.append(None)
            continue
        bits = 0
        for s in range(3):
            flipped = np.flip(part, axis=s)
            if np.max(np.abs(flipped - part)) <= tol * scale:
                continue
            if np.max(np.abs(flipped + part)) <= tol * scale:
                bits |= 1 << s
                continue
            return NO_SYMMETRY
        parts.append(bits)
    return ParityLabel(*parts)


def symmetrize(values: np.ndarray, bits: int) -> np.ndarray:
    """Project a real array onto the parity class ``bits`` by averaging reflections."""
    out = values
    for s in range(3):
        sign = -1.0 if bits >> s & 1 else 1.0
        out = 0.5 * (out + sign * np.flip(out, axis=out.ndim - 3 + s))
    return out


def impose_label(values: np.ndarray, label: ParityLabel) -> np.ndarray:
    """Complex array with real/imaginary parts projected onto ``label``."""
    re = np.zeros(values.shape) if label.alpha is None else symmetrize(np.real(values), label.alpha)
    im = np.zeros(values.shape) if label.beta is None else symmetrize(np.imag(values), label.beta)
    return re + 1j * im
