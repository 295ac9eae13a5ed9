"""VC-dimension scales and excess-error bounds for dense, convolutional,
Dropout and DropConnect networks.

Every VC "bound" here is an order expression with its constant set to 1,
so results are bound *scales*, not certified bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from texdim.errors import DomainError

VARIANTS = ("dense", "cnn", "dropout", "dropconnect")


@dataclass(frozen=True)
class ArchitectureSpec:
    variant: str
    layer_sizes: tuple[int, ...] = ()
    maps: int = 0
    kernel: int = 0
    subsample: int = 0
    layers: int = 0
    drop_p: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.variant == "cnn":
            if min(self.maps, self.kernel, self.subsample, self.layers) < 1:
                raise DomainError("cnn needs maps, kernel, subsample, layers >= 1")
        else:
            if len(self.layer_sizes) < 2 or min(self.layer_sizes) < 1:
                raise DomainError("layer_sizes needs >= 2 layers, each of size >= 1")
        if not 0.0 <= self.drop_p < 1.0:
            raise DomainError(f"drop probability must lie in [0, 1), got {self.drop_p}")


@dataclass
class BoundReport:
    architecture: ArchitectureSpec
    w: int
    vc_upper: float
    gamma: float | None = None
    flags: list[str] = field(default_factory=list)


def weight_count(layer_sizes) -> int:
    sizes = list(layer_sizes)
    if len(sizes) < 2:
        raise DomainError("weight_count needs at least two layers")
    return sum(a * b for a, b in zip(sizes, sizes[1:]))


def vc_bound_dense(w: int) -> float:
    if w < 1:
        raise DomainError(f"w must be >= 1, got {w}")
    return float(w**4)


def cell_count(p: int, d: int) -> int:
    """Cells cut out of d-space by p hyperplanes in general position."""
    if p < 0 or d < 1:
        raise DomainError(f"need p >= 0 and d >= 1, got p={p}, d={d}")
    if p <= d:
        return 2**p
    return sum(math.comb(p, i) for i in range(d + 1))


def classes_supported(p: int, d: int) -> float:
    c = cell_count(p, d)
    # 2**(p/d) directly when possible; huge ints overflow float conversion
    if p <= d:
        return 2.0 ** (p / d)
    return math.exp(math.log(c) / d)


def cnn_input_size(k: int, s: int, l: int) -> int:
    """Input side n for which l (conv k, subsample s) stages reduce to 1."""
    if k < 1 or s < 1 or l < 0:
        raise DomainError(f"need k, s >= 1 and l >= 0, got k={k}, s={s}, l={l}")
    return s**l + k * sum(s**j for j in range(l))


def cnn_layer_extents(k: int, s: int, l: int) -> list[float]:
    """Spatial extent feeding each layer's operation count: n-k, (n-k)/s-k, ..."""
    n = cnn_input_size(k, s, l)
    extents = [float(n - k)]
    for _ in range(l - 1):
        extents.append(extents[-1] / s - k)
    return extents


def cnn_operation_count(m: float, k: int, s: int, l: int, form: str = "paper") -> float:
    """Total operation count t with m/l maps in every layer.

    ``form``:
      * ``"paper"`` - the published closed form (valid for s >= 2; falls back to
        the layer sum at s == 1, where that form divides by zero)
      * ``"sum"`` - the direct per-layer sum
      * ``"closed"`` - a closed form re-derived from the layer sum, s >= 2

    The published closed form does not equal the layer sum for l >= 2.
    """
    if m < 1 or k < 1 or s < 1 or l < 1:
        raise DomainError(f"need m, k, s, l >= 1, got m={m}, k={k}, s={s}, l={l}")
    per_layer = m / l
    if form == "sum" or (form == "paper" and s == 1):
        return per_layer * sum(cnn_layer_extents(k, s, l))
    if s == 1:
        raise DomainError("the closed form needs s >= 2; use form='sum'")
    if form == "paper":
        return m * k * s**2 * (s ** (l - 1) - 1) / (l * (s - 1) ** 2) + m * s * (s**l - 1) / (l * (s - 1))
    if form == "closed":
        geo = s * (s**l - 1) / (s - 1)
        return per_layer * (geo + k * (geo - l * s) / (s - 1))
    raise DomainError(f"unknown form {form!r}")


def cnn_parameter_dimension(m: int, k: int) -> int:
    return m * k


def vc_bound_cnn(m: float, k: int, s: int, l: int) -> float:
    if min(m, k, s, l) < 1:
        raise DomainError(f"need m, k, s, l >= 1, got m={m}, k={k}, s={s}, l={l}")
    return m**4 * k**4 * s ** (2 * l - 2) / l**2


def _check_drop(w, p):
    if w < 1:
        raise DomainError(f"w must be >= 1, got {w}")
    if not 0.0 <= p < 1.0:
        raise DomainError(f"drop probability must lie in [0, 1), got {p}")


def vc_bound_dropout(w: int, p: float) -> float:
    _check_drop(w, p)
    return (1.0 - p) ** 8 * w**4


def vc_bound_dropconnect(w: int, p: float) -> float:
    _check_drop(w, p)
    return (1.0 - p) ** 4 * w**4


def excess_error_bound(h: float, N: int, eta: float) -> float:
    """sqrt((h (ln(2N/h) + 1) - ln(eta/4)) / N)."""
    if h <= 0:
        raise DomainError(f"VC value h must be > 0, got {h}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must lie in (0, 1], got {eta}")
    radicand = (h * (math.log(2.0 * N / h) + 1.0) - math.log(eta / 4.0)) / N
    if radicand <= 0:
        raise DomainError(f"nonpositive radicand {radicand!r} for h={h}, N={N}, eta={eta}")
    return math.sqrt(radicand)


def monotone_regime(h: float, N: int) -> bool:
    """True when h lies where h (ln(2N/h) + 1) increases, i.e. h < 2N/e."""
    return 0 < h < 2.0 * N / math.e


def gamma_dropout_vs_dropconnect(w: int, p: float, N: int, eta: float):
    """Excess-error bounds ``(gamma_dropout, gamma_dropconnect, ordered)``."""
    g_do = excess_error_bound(vc_bound_dropout(w, p), N, eta)
    g_dc = excess_error_bound(vc_bound_dropconnect(w, p), N, eta)
    return g_do, g_dc, g_do <= g_dc


def bound_report(arch: ArchitectureSpec, N: int | None = None, eta: float = 0.05) -> BoundReport:
    if arch.variant == "cnn":
        w = cnn_parameter_dimension(arch.maps, arch.kernel)
        vc = vc_bound_cnn(arch.maps, arch.kernel, arch.subsample, arch.layers)
    else:
        w = weight_count(arch.layer_sizes)
        vc = {
            "dense": lambda: vc_bound_dense(w),
            "dropout": lambda: vc_bound_dropout(w, arch.drop_p),
            "dropconnect": lambda: vc_bound_dropconnect(w, arch.drop_p),
        }[arch.variant]()
    report = BoundReport(architecture=arch, w=w, vc_upper=vc)
    if N is not None:
        if not monotone_regime(vc, N):
            report.flags.append("outside_monotone_regime")
        try:
            report.gamma = excess_error_bound(vc, N, eta)
        except DomainError:
            report.flags.append("nonpositive_radicand")
    return report
