"""Monte-Carlo oracle, operational protocol simulators and the Markov check.

The direct oracle averages the defining commutator norm over Haar unitaries
drawn inside each algebra.  The two protocol simulators estimate the same
quantity the way a laboratory would: swap-test expectations over Choi-type
"algebra states" (protocol 1) and over projected Haar-random pure states
(protocol 2).  Shot noise, when requested, is binomial on the swap-test
outcome probabilities.

Sample i of every loop draws from the stream at counter i, so estimates are
reproducible from (seed, samples) regardless of evaluation order or chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebras import (
    OperatorAlgebra,
    center,
    haar_algebra_unitary,
    is_collinear,
)
from .errors import (
    AlgebraError,
    IllConditionedEstimatorError,
    NonCollinearError,
)
from .linalg import (
    _haar_state_from_generator,
    _haar_unitary_from_generator,
    dagger,
    hs_norm_sq,
    swap_perm,
)
from .man import clamp_unit, man_omega, omega_operator
from .rng import RngStream

# Sub-stream roles, so one user seed drives independent draw families.
_STREAM_UNITARIES_A = 1
_STREAM_UNITARIES_B = 2
_STREAM_STATES = 3
_STREAM_SHOTS = 4
_STREAM_ORBIT = 5

__all__ = [
    "AlgebraState",
    "EstimatorResult",
    "MarkovCheckReport",
    "algebra_state",
    "markov_bound_check",
    "mc_man_direct",
    "mc_orbit_averaged_man",
    "protocol_choi",
    "protocol_stochastic",
    "restricted_distance",
]


@dataclass(frozen=True)
class EstimatorResult:
    estimate: float
    std_error: float
    samples: int
    method: str
    seed: int
    stream: int = 0
    shots_per_swap: Optional[int] = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "std_error": self.std_error,
            "samples": self.samples,
            "method": self.method,
            "seed": self.seed,
            "stream": self.stream,
            "shots_per_swap": self.shots_per_swap,
            "extras": dict(self.extras),
        }


@dataclass(frozen=True)
class AlgebraState:
    """Choi state of the conditional expectation; purity d(A)/d^2."""

    rho: np.ndarray
    d: int

    def purity(self) -> float:
        return float(np.real(np.sum(self.rho * self.rho.T)))

    def renyi2(self, log_base: float = 2.0) -> float:
        return -math.log(self.purity()) / math.log(log_base)


def algebra_state(alg: OperatorAlgebra) -> AlgebraState:
    return AlgebraState(alg.projection_superoperator().choi(), alg.d)


def _mean_and_se(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def mc_man_direct(
    a: OperatorAlgebra, b: OperatorAlgebra, samples: int, rng: RngStream
) -> EstimatorResult:
    """Unbiased sampling of the defining average ||[U, V]||^2 / (2d)."""
    if a.d != b.d:
        raise AlgebraError(f"ambient dimensions differ: {a.d} vs {b.d}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    dec_a, dec_b = a.decomposition(), b.decomposition()
    rng_a = rng.substream(_STREAM_UNITARIES_A)
    rng_b = rng.substream(_STREAM_UNITARIES_B)
    vals = np.empty(samples)
    for i in range(samples):
        u = haar_algebra_unitary(dec_a, rng_a, i)
        v = haar_algebra_unitary(dec_b, rng_b, i)
        vals[i] = hs_norm_sq(u @ v - v @ u) / (2 * a.d)
    mean, se = _mean_and_se(vals)
    return EstimatorResult(
        estimate=mean, std_error=se, samples=samples,
        method="mc.direct", seed=rng.seed, stream=rng.stream,
    )


def _require_collinear(alg: OperatorAlgebra) -> None:
    coll, _ = is_collinear(alg.decomposition())
    if not coll:
        raise NonCollinearError("protocol requires the first algebra to be collinear")


def _swap_test(value: float, shots: int, gen: np.random.Generator) -> tuple[float, float]:
    """Simulated swap test: binomial draw on p = (1 + value)/2 over N shots."""
    p = (1.0 + value) / 2.0
    hits = gen.binomial(shots, p)
    p_hat = hits / shots
    est = 2.0 * p_hat - 1.0
    se = 2.0 * math.sqrt(max(p_hat * (1.0 - p_hat), 1.0 / (4 * shots)) / shots)
    return est, se


def protocol_choi(
    a: OperatorAlgebra,
    b: Optional[OperatorAlgebra] = None,
    shots: Optional[int] = None,
    rng: Optional[RngStream] = None,
    log_base: float = 2.0,
) -> EstimatorResult:
    """Algebra-state protocol: S = 1 - Tr(S w(A) (x) w(B'))/||w(A)||^2.

    With b omitted this is the self variant: the numerator becomes the purity
    of the center's algebra state.  shots=None evaluates the swap expectations
    exactly; otherwise each is a binomial swap-test simulation.
    """
    _require_collinear(a)
    self_mode = b is None or b is a
    if self_mode:
        target = center(a)
    else:
        if a.d != b.d:
            raise AlgebraError(f"ambient dimensions differ: {a.d} vs {b.d}")
        target = b.commutant_algebra()
    omega_a = algebra_state(a)
    omega_t = algebra_state(target)
    num = float(np.real(np.sum(omega_a.rho * omega_t.rho.T)))
    den = omega_a.purity()
    extras = {
        "numerator": num,
        "denominator": den,
        "target_dim": target.dim,
        "self_mode": self_mode,
    }
    if self_mode:
        extras["nc2"] = omega_t.renyi2(log_base) - omega_a.renyi2(log_base)
    if shots is None:
        s = clamp_unit(1.0 - num / den)
        return EstimatorResult(
            estimate=s, std_error=0.0, samples=0,
            method="protocol.choi", seed=rng.seed if rng else 0,
            stream=rng.stream if rng else 0, extras=extras,
        )
    if rng is None:
        raise ValueError("shot-noise mode needs an RngStream")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    gen = rng.substream(_STREAM_SHOTS).generator(0)
    num_hat, num_se = _swap_test(num, shots, gen)
    den_hat, den_se = _swap_test(den, shots, gen)
    ratio = num_hat / den_hat
    se = math.sqrt((num_se / den_hat) ** 2 + (num_hat * den_se / den_hat**2) ** 2)
    extras.update({"numerator_estimate": num_hat, "denominator_estimate": den_hat})
    return EstimatorResult(
        estimate=1.0 - ratio, std_error=se, samples=0,
        method="protocol.choi", seed=rng.seed, stream=rng.stream,
        shots_per_swap=shots, extras=extras,
    )


def protocol_stochastic(
    a: OperatorAlgebra,
    b: Optional[OperatorAlgebra] = None,
    samples: Optional[int] = None,
    shots: Optional[int] = None,
    rng: Optional[RngStream] = None,
) -> EstimatorResult:
    """Random-state protocol: paired purity/overlap averages over Haar states.

    samples=None evaluates both expectations exactly (two-design identity);
    sampled mode reuses the same state draws for numerator and denominator.
    The b=None self variant replaces the numerator by the center's average
    state purity.
    """
    _require_collinear(a)
    self_mode = b is None or b is a
    if self_mode:
        target = center(a)
    else:
        if a.d != b.d:
            raise AlgebraError(f"ambient dimensions differ: {a.d} vs {b.d}")
        target = b.commutant_algebra()
    d = a.d
    offset = 1.0 / (d + 1)
    if samples is None:
        ra = a.basis.reshape(a.dim, -1)
        rt = target.basis.reshape(target.dim, -1)
        if self_mode:
            cross = float(target.dim)
        else:
            cross = float(np.sum(np.abs(ra.conj() @ rt.T) ** 2))
        e_num = (cross + d) / (d * (d + 1))
        e_den = (a.dim + d) / (d * (d + 1))
        s = clamp_unit(1.0 - (e_num - offset) / (e_den - offset))
        return EstimatorResult(
            estimate=s, std_error=0.0, samples=0,
            method="protocol.stochastic", seed=rng.seed if rng else 0,
            stream=rng.stream if rng else 0,
            extras={"mean_numerator": e_num, "mean_denominator": e_den,
                    "self_mode": self_mode},
        )
    if samples < 2:
        raise ValueError("sampled mode needs samples >= 2")
    if rng is None:
        raise ValueError("sampled mode needs an RngStream")
    rng_states = rng.substream(_STREAM_STATES)
    shot_gen = rng.substream(_STREAM_SHOTS).generator(0) if shots else None
    xs = np.empty(samples)
    ys = np.empty(samples)
    for i in range(samples):
        phi = _haar_state_from_generator(d, rng_states.generator(i))
        rho = np.outer(phi, phi.conj())
        pa = a.project(rho)
        pt = target.project(rho)
        x = float(np.real(np.sum(pa.conj() * pt)))
        y = float(np.real(np.sum(pa.conj() * pa)))
        if shots:
            x, _ = _swap_test(x, shots, shot_gen)
            y, _ = _swap_test(y, shots, shot_gen)
        xs[i] = x
        ys[i] = y
    mean_x, se_x = _mean_and_se(xs)
    mean_y, se_y = _mean_and_se(ys)
    den = mean_y - offset
    if abs(den) <= 3.0 * se_y:
        raise IllConditionedEstimatorError(
            f"denominator estimate {den:.3e} is within 3 std errors ({se_y:.3e}) of zero"
        )
    num = mean_x - offset
    ratio = num / den
    cov = float(np.cov(xs, ys, ddof=1)[0, 1]) if samples > 1 else 0.0
    var_ratio = (
        np.var(xs, ddof=1) + ratio**2 * np.var(ys, ddof=1) - 2 * ratio * cov
    ) / (samples * den**2)
    se = math.sqrt(max(var_ratio, 0.0))
    return EstimatorResult(
        estimate=1.0 - ratio, std_error=se, samples=samples,
        method="protocol.stochastic", seed=rng.seed, stream=rng.stream,
        shots_per_swap=shots,
        extras={"mean_numerator": mean_x, "mean_denominator": mean_y,
                "se_numerator": se_x, "se_denominator": se_y,
                "self_mode": self_mode},
    )


def restricted_distance(
    u: np.ndarray,
    v: np.ndarray,
    observer: OperatorAlgebra,
    rho0: np.ndarray,
) -> float:
    """Largest expectation gap the observer algebra can see between U, V encodings.

    The supremum over X in the algebra with ||X||_inf <= 1 decouples over
    central blocks: with Delta = U^dag rho U - V^dag rho V it equals
    sum_J ||Tr_{n_J}(Pi_J Delta Pi_J)||_1 by trace-norm duality on each block.
    """
    d = observer.d
    for w in (u, v):
        if w.shape != (d, d) or np.linalg.norm(dagger(w) @ w - np.eye(d)) > 1e-8 * d:
            raise AlgebraError("encoding operators must be unitaries of matching dimension")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise AlgebraError("state has wrong shape")
    herm = np.linalg.norm(rho0 - dagger(rho0))
    if herm > 1e-8 or abs(np.trace(rho0).real - 1.0) > 1e-8:
        raise AlgebraError("rho0 must be hermitian with unit trace")
    if np.linalg.eigvalsh((rho0 + dagger(rho0)) / 2).min() < -1e-9:
        raise AlgebraError("rho0 must be positive semi-definite")
    delta = dagger(u) @ rho0 @ u - dagger(v) @ rho0 @ v
    total = 0.0
    for blk in observer.decomposition().blocks:
        g = (dagger(blk.isometry) @ delta @ blk.isometry).reshape(blk.n, blk.d, blk.n, blk.d)
        m = np.einsum("plpm->lm", g)
        total += float(np.sum(np.abs(np.linalg.eigvalsh((m + dagger(m)) / 2))))
    return total


@dataclass(frozen=True)
class MarkovCheckReport:
    probability: float
    probability_se: float
    bound: float
    bound_alt: float
    c_value: float
    c_value_alt: float
    epsilon: float
    S: float
    samples: int
    state_samples: int
    seed: int
    violated: bool
    max_distance: float

    def to_dict(self) -> dict:
        return {
            "probability": self.probability,
            "probability_se": self.probability_se,
            "bound": self.bound,
            "bound_alt": self.bound_alt,
            "c_value": self.c_value,
            "c_value_alt": self.c_value_alt,
            "epsilon": self.epsilon,
            "S": self.S,
            "samples": self.samples,
            "state_samples": self.state_samples,
            "seed": self.seed,
            "violated": self.violated,
            "max_distance": self.max_distance,
        }


def markov_bound_check(
    a: OperatorAlgebra,
    b: OperatorAlgebra,
    epsilon: float,
    samples: int = 1000,
    state_samples: int = 32,
    rng: Optional[RngStream] = None,
) -> MarkovCheckReport:
    """Empirical tail probability of the restricted distance vs. its bound.

    The sup over initial states is lower-bounded by a max over sampled pure
    states, which keeps the test one-sided: any observed violation of the
    bound is a genuine one.  The constant is c(B) = 2 sqrt(2 d(B) r) with
    r = max_J d_J/n_J over the observer's blocks; the alternative reading
    with r outside the square root is reported alongside for comparison.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if a.d != b.d:
        raise AlgebraError(f"ambient dimensions differ: {a.d} vs {b.d}")
    rng = rng or RngStream(0)
    s_value = man_omega(a, b).S
    dec_a = a.decomposition()
    dec_b = b.decomposition()
    ratio_max = max(blk.d / blk.n for blk in dec_b.blocks)
    d_b = dec_b.algebra_dim
    c_value = 2.0 * math.sqrt(2.0 * d_b * ratio_max)
    c_alt = 2.0 * math.sqrt(2.0 * d_b) * ratio_max
    bound = a.d * c_value / epsilon * math.sqrt(s_value)
    bound_alt = a.d * c_alt / epsilon * math.sqrt(s_value)
    rng_u = rng.substream(_STREAM_UNITARIES_A)
    rng_v = rng.substream(_STREAM_UNITARIES_B)
    rng_s = rng.substream(_STREAM_STATES)
    d = a.d
    hits = 0
    overall_max = 0.0
    for i in range(samples):
        u = haar_algebra_unitary(dec_a, rng_u, i)
        v = haar_algebra_unitary(dec_a, rng_v, i)
        best = 0.0
        for j in range(state_samples):
            phi = _haar_state_from_generator(d, rng_s.generator(i * state_samples + j))
            best = max(best, restricted_distance(u, v, b, np.outer(phi, phi.conj())))
        overall_max = max(overall_max, best)
        if best >= epsilon:
            hits += 1
    p_hat = hits / samples
    se = math.sqrt(p_hat * (1.0 - p_hat) / samples)
    violated = p_hat > bound + 5.0 * max(se, math.sqrt(0.25 / samples))
    return MarkovCheckReport(
        probability=p_hat, probability_se=se,
        bound=bound, bound_alt=bound_alt,
        c_value=c_value, c_value_alt=c_alt,
        epsilon=epsilon, S=s_value,
        samples=samples, state_samples=state_samples,
        seed=rng.seed, violated=violated, max_distance=overall_max,
    )


def mc_orbit_averaged_man(
    a: OperatorAlgebra, b: OperatorAlgebra, samples: int, rng: RngStream
) -> EstimatorResult:
    """Monte-Carlo estimate of E_U[S(A : U(B))] over Haar unitaries U."""
    if a.d != b.d:
        raise AlgebraError(f"ambient dimensions differ: {a.d} vs {b.d}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d = a.d
    omega_a = omega_operator(a).matrix
    omega_b = omega_operator(b).matrix
    perm = swap_perm(d)
    omega_a_perm = omega_a[perm]
    rng_orbit = rng.substream(_STREAM_ORBIT)
    vals = np.empty(samples)
    for i in range(samples):
        u = _haar_unitary_from_generator(d, rng_orbit.generator(i))
        k = np.kron(u, u)
        omega_u = k @ omega_b @ dagger(k)
        vals[i] = 1.0 - float(np.real(np.sum(omega_a_perm * omega_u.T))) / d
    mean, se = _mean_and_se(vals)
    return EstimatorResult(
        estimate=mean, std_error=se, samples=samples,
        method="mc.orbit", seed=rng.seed, stream=rng.stream,
    )
