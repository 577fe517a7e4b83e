from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Callable

from .config import Config

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 1_000_000
RELATIVE_TOLERANCE = 1e-6


class SizingError(ValueError):
    pass


class CrossoverModel(str, Enum):
    HHL = "HHL"
    CJS = "CJS"


@dataclass(frozen=True)
class QaeChoice:
    m_bound: int
    M: int
    n0: int


@dataclass(frozen=True)
class ProblemParams:
    N: int
    kappa: float
    d: int
    epsilon: float
    Nb: int
    k: int
    normA_t: float
    r: int
    r_from_override: bool
    t0: float
    M: int
    m_bound: int
    n0: int
    n1: int
    n2: int
    n4: int
    mix_true: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def fem_edges(nx: int, ny: int) -> int:
    if nx < 1 or ny < 1:
        raise SizingError(f"grid needs nx, ny >= 1, got {nx}x{ny}")
    return nx * (ny - 1) + ny * (nx - 1)


def data_register_size(N: int) -> int:
    """ceil(log2(2N)), computed on integers."""
    if N < 1:
        raise SizingError(f"N must be >= 1, got {N}")
    return (2 * N - 1).bit_length()


def qae_M(epsilon: float, p_err: float, alpha: float = 1.0) -> QaeChoice:
    """
    Control-register size for amplitude estimation.

    Returns the success-probability bound on M and the simplified power of two
    M = 2^ceil(log2(1/eps^2)) that the profile uses.
    """
    if not (0 < epsilon < 1):
        raise SizingError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not (0 < p_err < 1):
        raise SizingError(f"p_err must lie in (0, 1), got {p_err}")
    if not (0 < alpha <= 1):
        raise SizingError(f"alpha must lie in (0, 1], got {alpha}")

    m_bound = math.ceil(math.pi / (epsilon * math.sqrt(alpha)) * (2 + 1 / p_err))
    # guard against log2 landing a hair above an exact integer
    n0 = max(0, math.ceil(math.log2(1 / epsilon**2) - 1e-9))
    return QaeChoice(m_bound=m_bound, M=2**n0, n0=n0)


def trotter_slices(k: int, Nb: int, normA_t: float, epsilon: float) -> int:
    if k < 1 or Nb < 1 or normA_t <= 0 or epsilon <= 0:
        raise SizingError(
            f"trotter_slices needs positive inputs, got k={k}, Nb={Nb}, "
            f"normA_t={normA_t}, epsilon={epsilon}"
        )
    value = (
        5 ** (k - 0.5)
        * (2 * Nb * normA_t) ** (1 + 1 / (2 * k))
        / epsilon ** (1 / (2 * k))
    )
    return math.ceil(value)


def hs_time_constant(kappa: float, epsilon: float) -> float:
    if kappa <= 0:
        raise SizingError(f"kappa must be positive, got {kappa}")
    if not (0 < epsilon < 1):
        raise SizingError(f"epsilon must lie in (0, 1), got {epsilon}")
    return 7 * kappa / epsilon


def _quantum_ops(model: CrossoverModel, kappa: float, d: float, epsilon: float) -> Callable[[float], float]:
    if model is CrossoverModel.HHL:
        return lambda n: kappa**2 * d**2 * math.log10(n) / epsilon
    return lambda n: kappa * d**7 * math.log10(n) / epsilon**2


def crossover_size(
    kappa: float,
    d: float,
    epsilon: float,
    model: CrossoverModel | str = CrossoverModel.HHL,
) -> float:
    """
    Problem size where the classical N d kappa log10(1/eps) meets the quantum
    operation count, by fixed-point iteration from N = 10.
    """
    model = CrossoverModel(model)
    if kappa <= 0 or d <= 0 or not (0 < epsilon < 1):
        raise SizingError(
            f"crossover_size needs kappa, d > 0 and epsilon in (0, 1), "
            f"got kappa={kappa}, d={d}, epsilon={epsilon}"
        )
    classical_per_n = d * kappa * math.log10(1 / epsilon)
    if classical_per_n <= 0:
        raise SizingError("classical cost per unknown is not positive")
    quantum = _quantum_ops(model, kappa, d, epsilon)

    n = 10.0
    for i in range(MAX_ITERATIONS):
        if n <= 1:
            raise SizingError(f"crossover iteration left the domain at N={n:g}")
        nxt = quantum(n) / classical_per_n
        if abs(nxt - n) <= RELATIVE_TOLERANCE * abs(nxt):
            logger.debug("crossover (%s) converged after %d iterations", model.value, i + 1)
            return nxt
        n = nxt
    raise SizingError(f"crossover iteration did not converge in {MAX_ITERATIONS} steps")


def resolve_params(config: Config) -> ProblemParams:
    p = config.problem
    N = p.N if p.N is not None else fem_edges(p.nx, p.ny)  # type: ignore[arg-type]
    qae = qae_M(p.epsilon, p.p_err, p.alpha)
    t0 = hs_time_constant(p.kappa, p.epsilon)
    normA_t = t0 * config.trotter.time_fraction

    r_override = config.trotter.r_override
    if r_override is not None:
        r = r_override
    else:
        eps = p.epsilon
        if config.trotter.split_error:
            eps = p.epsilon / (2 ** (qae.n0 + 1) - 1)
        r = trotter_slices(config.suzuki.k, p.Nb, normA_t, eps)

    params = ProblemParams(
        N=N,
        kappa=p.kappa,
        d=p.d,
        epsilon=p.epsilon,
        Nb=p.Nb,
        k=config.suzuki.k,
        normA_t=normA_t,
        r=r,
        r_from_override=r_override is not None,
        t0=t0,
        M=qae.M,
        m_bound=qae.m_bound,
        n0=qae.n0,
        n1=config.registers.n1,
        n2=data_register_size(N),
        n4=config.registers.n4,
        mix_true=config.oracles.mix_true,
    )
    logger.info(
        "resolved N=%d n0=%d n2=%d r=%d%s",
        N,
        params.n0,
        params.n2,
        r,
        " (override)" if params.r_from_override else "",
    )
    return params


def expression_env(params: ProblemParams) -> dict[str, int]:
    return {
        "n0": params.n0,
        "n1": params.n1,
        "n2": params.n2,
        "n4": params.n4,
        "Nb": params.Nb,
        "k": params.k,
        "r": params.r,
        "mix_true": params.mix_true,
    }


def register_total(params: ProblemParams) -> int:
    """Persistent logical registers: n0 + 2 n1 + 3 n2 + 2 n4 plus five single qubits."""
    return params.n0 + 2 * params.n1 + 3 * params.n2 + 2 * params.n4 + 5


def data_qubits(params: ProblemParams) -> int:
    return 2 * params.n2
