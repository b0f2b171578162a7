"""
Service layer for the truncated Fock-basis reference simulation.

Every quantity here is computed from dense density matrices, independently of
the Gaussian-fringe engine, and is used to cross-check it on small instances.
"""

import math
import time
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import qutip
from scipy import interpolate, optimize

from core.config import settings
from core.logging import get_logger, log_service_operation
from domain.entities.fock import FockDensity
from domain.entities.operators import OperatorDescriptor, Phase
from domain.entities.phase_space import Grid
from domain.models.exceptions import (
    ConfigValidationError,
    HermiticityError,
    NonPhysicalStateError,
    QuadratureConvergenceError,
    TruncationLeakageError,
)
from domain.models.requests.protocol import InputKind, ProtocolConfig
from domain.utils.operator_algebra import descriptors_for, resolve_phases

LEAKAGE_LEVELS = 5


@lru_cache(maxsize=16)
def quadrature_bases(dimension: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Eigen-decompositions of the truncated X and P matrices: (λx, Ux, λp, Up)."""
    x_values, x_vectors = np.linalg.eigh(qutip.position(dimension).full())
    p_values, p_vectors = np.linalg.eigh(qutip.momentum(dimension).full())
    for array in (x_values, x_vectors, p_values, p_vectors):
        array.setflags(write=False)
    return x_values, x_vectors, p_values, p_vectors


def dimension_for(steps: int, coupling: float, occupation: float) -> int:
    """D = ceil((Nμ)²/2 + 6Nμ + 30), raised until the thermal tail is below 1e-10."""
    separation = steps * coupling
    dimension = math.ceil(separation**2 / 2 + 6 * separation + 30)
    if occupation > 0:
        tail = math.ceil(math.log(1e-10) / math.log(occupation / (1 + occupation)))
        dimension = max(dimension, tail + 2 * LEAKAGE_LEVELS + math.ceil(separation**2 / 2))
    return dimension


def hermite_functions(u: np.ndarray, count: int) -> np.ndarray:
    """Oscillator eigenfunctions ψ_0..ψ_{count-1} at u, shape (count, len(u))."""
    u = np.asarray(u, dtype=float)
    psi = np.zeros((count, u.size))
    psi[0] = np.pi**-0.25 * np.exp(-(u**2) / 2)
    if count > 1:
        psi[1] = np.sqrt(2.0) * u * psi[0]
    for n in range(1, count - 1):
        psi[n + 1] = np.sqrt(2.0 / (n + 1)) * u * psi[n] - np.sqrt(n / (n + 1)) * psi[n - 1]
    return psi


def function_of_x(dimension: int, values: np.ndarray) -> np.ndarray:
    """Matrix f(X) given f at the eigenvalues of X."""
    _, vectors, _, _ = quadrature_bases(dimension)
    return (vectors * values[None, :]) @ vectors.conj().T


def descriptor_matrix(op: OperatorDescriptor, dimension: int) -> np.ndarray:
    """M = Σ c_k e^{ikμX} in the number basis."""
    x_values, _, _, _ = quadrature_bases(dimension)
    exponents = op.exponents
    phases = np.exp(1j * op.coupling * np.outer(x_values, exponents))
    return function_of_x(dimension, phases @ op.coefficients[exponents])


class FockOracleService:
    """Service class for brute-force density-matrix simulation."""

    def __init__(self):
        self.logger = get_logger(__name__)

    def thermal_density(self, occupation: float, dimension: int) -> FockDensity:
        """
        Truncated thermal state with populations n̄^n/(1+n̄)^{n+1}.

        Raises:
            TruncationLeakageError: if the Boltzmann tail beyond D exceeds 1e-10
        """
        if occupation < 0:
            raise ConfigValidationError("initial_occupation", "must be nonnegative")
        n = np.arange(dimension)
        populations = occupation**n / (1 + occupation) ** (n + 1)
        if 1 - populations.sum() > 1e-10:
            raise TruncationLeakageError(f"thermal tail {1 - populations.sum():.2e} beyond D={dimension}")
        return FockDensity(np.diag(populations))

    def check_leakage(self, rho: FockDensity) -> None:
        leakage = rho.leakage(LEAKAGE_LEVELS)
        if leakage > settings.fock_leakage_tolerance:
            raise TruncationLeakageError(f"population {leakage:.2e} in the top levels of D={rho.dimension}")

    def check_physical(self, rho: FockDensity) -> None:
        tolerance = settings.fock_physicality_tolerance
        if rho.hermiticity_error() > tolerance:
            raise HermiticityError(f"density matrix off Hermitian by {rho.hermiticity_error():.2e}")
        if rho.min_eigenvalue() < -tolerance:
            raise NonPhysicalStateError(f"density matrix eigenvalue {rho.min_eigenvalue():.2e}")

    def apply_descriptor(self, rho: FockDensity, op: OperatorDescriptor) -> FockDensity:
        """ρ → MρM†, unnormalized."""
        matrix = descriptor_matrix(op, rho.dimension)
        result = FockDensity(matrix @ rho.matrix @ matrix.conj().T)
        self.check_leakage(result)
        return result

    def thermal_channel_fock(self, rho: FockDensity, added: float) -> FockDensity:
        """
        Average of D(β)ρD†(β) over a Gaussian with n̄_th phonons.

        The average factorizes into momentum kicks and position shifts, each
        diagonal in its quadrature eigenbasis; both Gaussian averages are
        evaluated by Gauss–Hermite quadrature with order doubling.

        Raises:
            QuadratureConvergenceError: if doubling the order keeps changing the result
        """
        if added < 0:
            raise ConfigValidationError("per_step_thermal", "must be nonnegative")
        if added == 0:
            return rho
        x_values, x_vectors, p_values, p_vectors = quadrature_bases(rho.dimension)
        matrix = rho.matrix
        for values, vectors in ((x_values, x_vectors), (p_values, p_vectors)):
            local = vectors.conj().T @ matrix @ vectors
            gap = values[:, None] - values[None, :]
            local = local * self._gaussian_kernel(gap, added, local)
            matrix = vectors @ local @ vectors.conj().T
        return FockDensity(matrix)

    def _gaussian_kernel(self, gap: np.ndarray, added: float, local: np.ndarray) -> np.ndarray:
        order = settings.fock_hermite_order
        scale = np.sqrt(2 * added)

        def kernel(n: int) -> np.ndarray:
            nodes, weights = np.polynomial.hermite.hermgauss(n)
            total = np.zeros_like(gap, dtype=complex)
            for t, w in zip(nodes, weights):
                total += w * np.exp(1j * scale * t * gap)
            return total / np.sqrt(np.pi)

        current = kernel(order)
        while order < settings.fock_max_hermite_order:
            refined = kernel(2 * order)
            if np.abs(local * (refined - current)).max() <= settings.fock_leakage_tolerance:
                return refined
            order *= 2
            current = refined
        raise QuadratureConvergenceError(f"Gauss–Hermite average unsettled at order {order}")

    def lossy_step_fock(
        self,
        rho: FockDensity,
        efficiency: float,
        input_kind: InputKind,
        outcome: Tuple[int, int],
        coupling: float,
        phase: Phase,
        alpha: complex = 0.0,
    ) -> FockDensity:
        """
        One heralded step with beam-splitter loss on both arms, traced over the environment.

        For each X eigenvalue the four output modes hold coherent amplitudes
        β₁ = √η α(z+e)/√2, β₂ = √η α(z-e)/√2, β₃ = √(1-η) α z, β₄ = √(1-η) α e
        with z = e^{iμX} and e = e^{iφ}; a single photon reaches the detectors
        only through the first two.
        """
        if not 0 < efficiency <= 1:
            raise ConfigValidationError("efficiency", "must lie in (0, 1]")
        m, n = (int(c) for c in outcome)
        x_values, _, _, _ = quadrature_bases(rho.dimension)
        z = np.exp(1j * coupling * x_values)
        e = phase.unit()

        if input_kind is InputKind.SINGLE_PHOTON:
            if (m, n) == (1, 0):
                amplitude = np.sqrt(efficiency) * (z + e) / 2
            elif (m, n) == (0, 1):
                amplitude = np.sqrt(efficiency) * (z - e) / 2
            else:
                raise ConfigValidationError("click_sequence", f"outcome {(m, n)} is not a single-photon herald")
            matrix = function_of_x(rho.dimension, amplitude)
            result = FockDensity(matrix @ rho.matrix @ matrix.conj().T)
            self.check_leakage(result)
            return result

        alpha = complex(alpha)
        detected = (
            np.exp(-abs(alpha) ** 2)
            * (np.sqrt(efficiency) * alpha / np.sqrt(2)) ** (m + n)
            * (z + e) ** m
            * (z - e) ** n
            / math.sqrt(math.factorial(m) * math.factorial(n))
        )
        lost_mean = (1 - efficiency) * abs(alpha) ** 2
        cutoff = 0
        while lost_mean > 0 and lost_mean**cutoff / math.factorial(cutoff) > 1e-14:
            cutoff += 1
        lost = np.sqrt(1 - efficiency) * alpha

        total = np.zeros_like(rho.matrix)
        for k in range(cutoff + 1):
            for l in range(cutoff + 1):
                environment = lost ** (k + l) * z**k * e**l / math.sqrt(math.factorial(k) * math.factorial(l))
                matrix = function_of_x(rho.dimension, detected * environment)
                total += matrix @ rho.matrix @ matrix.conj().T
        result = FockDensity(total)
        self.check_leakage(result)
        return result

    def run_sequence_fock(
        self, config: ProtocolConfig, dimension: Optional[int] = None
    ) -> Tuple[FockDensity, float]:
        """
        Full protocol in the number basis, doubling D whenever truncation leaks.

        Returns:
            (normalized final density, success weight)
        """
        start_time = time.time()
        dimension = dimension or dimension_for(
            config.steps, config.coupling, config.initial_occupation + config.steps * config.per_step_thermal
        )

        try:
            while True:
                try:
                    rho, weight = self._run_at(config, dimension)
                    break
                except TruncationLeakageError:
                    if 2 * dimension > settings.fock_max_dimension:
                        raise
                    dimension *= 2
                    self.logger.debug("Doubling Fock dimension", dimension=dimension)

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="FockOracleService",
                operation="run_sequence_fock",
                duration=duration,
                steps=config.steps,
                dimension=dimension,
                success_weight=weight,
            )
            return rho, weight

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="FockOracleService",
                operation="run_sequence_fock",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise

    def loss_trace_distance(self, config: ProtocolConfig) -> float:
        """
        Trace distance between the final state at the run's η and the lossless one.

        Single-photon heralds only lose weight, so the distance vanishes; for
        coherent input it is of order N(1-η)|α|².
        """
        start_time = time.time()

        try:
            lossy, _ = self.run_sequence_fock(config)
            lossless, _ = self.run_sequence_fock(config.model_copy(update={"efficiency": 1.0}))
            distance = lossy.trace_distance(lossless)

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="FockOracleService",
                operation="loss_trace_distance",
                duration=duration,
                input_kind=config.input_kind.value,
                efficiency=config.efficiency,
                trace_distance=distance,
            )
            return distance

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="FockOracleService",
                operation="loss_trace_distance",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise

    def _run_at(self, config: ProtocolConfig, dimension: int) -> Tuple[FockDensity, float]:
        rho = self.thermal_density(config.initial_occupation, dimension)
        weight = 1.0
        phases = resolve_phases(config)
        for step, (outcome, phase, op) in enumerate(
            zip(config.outcomes(), phases, descriptors_for(config)), start=1
        ):
            if config.efficiency < 1:
                rho = self.lossy_step_fock(
                    rho, config.efficiency, config.input_kind, outcome, config.coupling, phase, config.alpha
                )
            else:
                rho = self.apply_descriptor(rho, op)
            rho = self.thermal_channel_fock(rho, config.per_step_thermal)
            trace = rho.trace()
            weight *= trace
            rho = rho.normalized()
            self.check_leakage(rho)
        self.check_physical(rho)
        return rho, weight

    def wigner_of(self, rho: FockDensity, grid: Grid) -> np.ndarray:
        """W on the grid, indexed [x, p]."""
        field = qutip.wigner(rho.qobj, grid.x, grid.p, g=np.sqrt(2))
        return np.asarray(field).T

    def wigner_at(self, rho: FockDensity, x: float, p: float) -> float:
        return float(np.asarray(qutip.wigner(rho.qobj, np.array([x]), np.array([p]), g=np.sqrt(2)))[0, 0])

    def min_wigner(self, rho: FockDensity, start: Tuple[float, float]) -> Tuple[float, Tuple[float, float]]:
        """Nelder–Mead on the oracle field from a starting point."""
        result = optimize.minimize(
            lambda v: self.wigner_at(rho, v[0], v[1]),
            np.array(start, dtype=float),
            method="Nelder-Mead",
            options={"xatol": 1e-7, "fatol": 1e-12},
        )
        return float(result.fun), (float(result.x[0]), float(result.x[1]))

    def negative_volume(self, rho: FockDensity, grid: Grid) -> float:
        """∫ max(-W, 0) with cubic splines along X and a trapezoid rule along P."""
        field = self.wigner_of(rho, grid)
        rows = np.zeros(grid.np)
        for j in range(grid.np):
            spline = interpolate.CubicSpline(grid.x, field[:, j])
            roots = np.concatenate([[grid.x[0]], spline.roots(extrapolate=False), [grid.x[-1]]])
            for a, b in zip(roots[:-1], roots[1:]):
                if b > a and spline(0.5 * (a + b)) < 0:
                    rows[j] -= spline.integrate(a, b)
        return float(np.trapezoid(rows, grid.p))

    def lee_jeong(self, rho: FockDensity) -> float:
        """𝓘 = ¼(-Tr[X,ρ]² - Tr[P,ρ]² - 2Trρ²)."""
        x = qutip.position(rho.dimension).full()
        p = qutip.momentum(rho.dimension).full()
        matrix = rho.matrix
        cx = x @ matrix - matrix @ x
        cp = p @ matrix - matrix @ p
        value = -np.trace(cx @ cx) - np.trace(cp @ cp) - 2 * np.trace(matrix @ matrix)
        return float(0.25 * value.real)

    def cfi_quadrature(self, rho: FockDensity, angle: float, u: np.ndarray) -> float:
        """∫p'²/p for the marginal of X cos λ + P sin λ."""
        levels = np.arange(rho.dimension)
        rotated = rho.matrix * np.exp(-1j * angle * (levels[:, None] - levels[None, :]))
        psi = hermite_functions(u, rho.dimension + 1)
        # ψ_n' = √(n/2) ψ_{n-1} - √((n+1)/2) ψ_{n+1}
        dpsi = -np.sqrt((levels + 1) / 2)[:, None] * psi[1:]
        dpsi[1:] += np.sqrt(levels[1:] / 2)[:, None] * psi[:-2]
        psi = psi[:-1]
        applied = rotated @ psi
        density = np.sum(psi * applied, axis=0).real
        slope = 2 * np.sum(dpsi * applied, axis=0).real
        mask = density > 1e-300
        integrand = np.zeros_like(density)
        integrand[mask] = slope[mask] ** 2 / density[mask]
        return float(np.trapezoid(integrand, u))

    def macroscopicity(self, rho: FockDensity, u: np.ndarray) -> Tuple[float, float]:
        """½ max_λ F_λ over a λ scan refined by a bounded search."""
        count = settings.lambda_scan_points
        angles = np.arange(count) * np.pi / count
        scan = np.array([self.cfi_quadrature(rho, a, u) for a in angles])
        best = angles[int(np.argmax(scan))]
        step = np.pi / count
        result = optimize.minimize_scalar(
            lambda a: -self.cfi_quadrature(rho, a, u),
            bounds=(best - step, best + step),
            method="bounded",
            options={"xatol": 1e-8},
        )
        value = max(-result.fun, scan.max())
        return 0.5 * float(value), float(result.x)
