"""
Service layer orchestrating table reproduction, sweeps, state runs and oracle checks.
"""

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from core.config import settings
from core.logging import get_logger, log_service_operation
from domain.entities.phase_space import Grid, PhaseSpaceState
from domain.models.requests.device import DeviceParams, TimingParams
from domain.models.requests.loss import LossModel
from domain.models.requests.protocol import CatBranch, InputKind, PhaseOrdering, ProtocolConfig
from domain.models.requests.pulse import CavityParams, EnvelopeSpec
from domain.models.requests.sweep import SweepRequest
from domain.models.requests.table import Table1Spec
from domain.models.responses.measures import MeasureReport
from domain.models.responses.oracle import LossCheck, OracleCell, OracleCheckReport
from domain.models.responses.table import CellCheck, OptimalStep, SweepPoint, SweepReport, Table1Report, Table1Row
from domain.services.decoherence_service import DecoherenceService
from domain.services.fock_oracle_service import FockOracleService
from domain.services.heralding_service import HeraldingService
from domain.services.loss_service import LossService
from domain.services.measure_service import MeasureService
from domain.services.phase_space_service import PhaseSpaceService, bounding_box, field_at_points
from domain.services.protocol_service import ProtocolService
from domain.services.pulse_service import PulseService

ORACLE_WIGNER_TOLERANCE = 1e-7
ORACLE_MEASURE_TOLERANCE = 1e-4
ORACLE_PROBABILITY_TOLERANCE = 1e-10

# (configuration, trace-distance tolerance) pairs for the loss checks
LOSS_CHECKS = (
    (ProtocolConfig(steps=2, coupling=1.0, efficiency=0.9), 1e-10),
    (ProtocolConfig(steps=1, coupling=1.0, input_kind=InputKind.COHERENT, alpha=0.1, efficiency=0.99), 1e-3),
)


@dataclass(frozen=True)
class StateRun:
    """States after each step of one run and the cumulative success weights."""

    config: ProtocolConfig
    states: List[PhaseSpaceState]
    weights: List[float]

    @property
    def final(self) -> PhaseSpaceState:
        return self.states[-1]


def resolve_workers(workers: Optional[int]) -> int:
    """0 means every core."""
    workers = settings.workers if workers is None else workers
    if workers <= 0:
        return os.cpu_count() or 1
    return workers


def evaluate_sweep_point(point: Tuple[int, float, float, float, str, str]) -> SweepPoint:
    """Measures at one sweep point; module-level so worker processes can import it."""
    steps, coupling, per_step_thermal, occupation, branch, ordering = point
    phase_space_service = PhaseSpaceService()
    measure_service = MeasureService(phase_space_service)
    if steps == 0:
        state = PhaseSpaceState.thermal(occupation)
    else:
        config = ProtocolConfig(
            steps=steps,
            coupling=coupling,
            initial_occupation=occupation,
            per_step_thermal=per_step_thermal,
            branch=CatBranch(branch),
            ordering=PhaseOrdering(ordering),
        )
        decoherence_service = DecoherenceService(phase_space_service)
        state = ProtocolService(phase_space_service, decoherence_service).run_sequence(config)[0]
    report = measure_service.report(state)
    return SweepPoint(
        steps=steps,
        coupling=coupling,
        per_step_thermal=per_step_thermal,
        initial_occupation=occupation,
        min_w=report.min_w,
        delta=report.delta,
        lee_jeong=report.lee_jeong,
        macroscopicity=report.macroscopicity,
        optimal_lambda=report.optimal_lambda,
    )


def optimal_steps(points: Iterable[SweepPoint], measures: Tuple[str, ...] = ("macroscopicity", "delta")) -> List[OptimalStep]:
    """Step number maximizing each measure along every (μ, n̄_th, n̄) series."""
    series: Dict[Tuple[float, float, float], List[SweepPoint]] = {}
    for point in points:
        series.setdefault((point.coupling, point.per_step_thermal, point.initial_occupation), []).append(point)
    result = []
    for (coupling, n_th, occupation), members in sorted(series.items()):
        for measure in measures:
            best = max(members, key=lambda p: (getattr(p, measure), -p.steps))
            result.append(
                OptimalStep(
                    coupling=coupling,
                    per_step_thermal=n_th,
                    initial_occupation=occupation,
                    measure=measure,
                    steps=best.steps,
                    value=getattr(best, measure),
                )
            )
    return result


def oracle_matrix(quick: bool) -> List[ProtocolConfig]:
    """Configurations compared against the Fock oracle."""
    if quick:
        grid = itertools.product((1, 2), (1.0,), (0.0, 0.1), (0.0, 1e-3))
    else:
        grid = itertools.product((1, 2, 3, 4), (0.1, 1.0), (0.0, 0.1, 1.0), (0.0, 1e-3, 1e-2))
    return [
        ProtocolConfig(steps=n, coupling=mu, initial_occupation=nbar, per_step_thermal=n_th)
        for n, mu, nbar, n_th in grid
    ]


class ExperimentService:
    """Service class composing the physics services into experiments."""

    def __init__(
        self,
        phase_space_service: PhaseSpaceService,
        protocol_service: ProtocolService,
        decoherence_service: DecoherenceService,
        measure_service: MeasureService,
        heralding_service: HeraldingService,
        loss_service: LossService,
        pulse_service: PulseService,
        fock_oracle_service: FockOracleService,
    ):
        self.phase_space_service = phase_space_service
        self.protocol_service = protocol_service
        self.decoherence_service = decoherence_service
        self.measure_service = measure_service
        self.heralding_service = heralding_service
        self.loss_service = loss_service
        self.pulse_service = pulse_service
        self.fock_oracle_service = fock_oracle_service
        self.logger = get_logger(__name__)

    def protocol_config_for(self, device: DeviceParams) -> ProtocolConfig:
        """Protocol configuration of a device; μ comes from the matched pulse when g₀, κ are given."""
        coupling = device.coupling
        if coupling is None:
            cavity = CavityParams(g0=device.g0, kappa=device.kappa, envelope=EnvelopeSpec())
            coupling = self.pulse_service.coupling_from_pulse(cavity).coupling
        n_th, _ = self.decoherence_service.per_step_thermal_for(device)
        return ProtocolConfig(
            steps=device.steps,
            coupling=coupling,
            initial_occupation=device.initial_occupation,
            input_kind=device.input_kind,
            efficiency=device.efficiency,
            per_step_thermal=n_th,
            branch=device.branch,
            ordering=device.ordering,
        )

    def run_state(self, config: ProtocolConfig, loss: Optional[LossModel] = None) -> StateRun:
        """
        Run the protocol, optionally replacing the final state by its loss mixture.

        Args:
            config: Protocol configuration
            loss: Coherent-input loss model applied to the final state

        Returns:
            StateRun with the per-step states
        """
        states, weights = self.protocol_service.sequence_states(config)
        if loss is not None and loss.input_kind is InputKind.COHERENT:
            loss = self.loss_service.resolve(config, loss)
            if loss.efficiency < 1:
                mixed = self.loss_service.loss_mixture_state(config, loss, base=states[-1])
                states = states[:-1] + [mixed]
                weights = weights[:-1] + [self.loss_service.lossy_herald_probability(config, loss)]
        return StateRun(config=config, states=states, weights=weights)

    def grid_for(self, state: PhaseSpaceState, nx: Optional[int] = None, np_: Optional[int] = None) -> Grid:
        return self.phase_space_service.default_grid(state, nx, np_)

    def slices(self, state: PhaseSpaceState, grid: Grid, separation: float) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
        """Side views W(X=0, P) and W(X, P=Nμ/2)."""
        return {
            "p": (grid.p, field_at_points(state, 0.0, grid.p)),
            "x": (grid.x, field_at_points(state, grid.x, separation / 2)),
        }

    def measure(self, state: PhaseSpaceState, config: Optional[ProtocolConfig] = None) -> MeasureReport:
        inputs = config.model_dump(mode="json", exclude_none=True) if config is not None else {}
        return self.measure_service.report(state, inputs)

    def table1(self, spec: Table1Spec, labels: Optional[List[str]] = None) -> Table1Report:
        """
        Recompute every requested row and compare with its expected values.

        Args:
            spec: Parameter sets with expected values
            labels: Optional subset of row labels

        Returns:
            Table1Report with one CellCheck per expected column
        """
        start_time = time.time()

        try:
            timing = TimingParams(runs=spec.runs)
            rows = []
            for entry in spec.rows:
                device = entry.device
                if labels and device.label not in labels:
                    continue
                config = self.protocol_config_for(device)
                if config.per_step_thermal > 0:
                    state = self.decoherence_service.decohered_protocol_state(config)
                else:
                    state = self.protocol_service.run_sequence(config)[0]
                report = self.measure_service.report(state)
                computed = {
                    "per_step_thermal": config.per_step_thermal,
                    "total_time": self.heralding_service.total_time(config, device, timing),
                    "min_w": report.min_w,
                    "delta": report.delta,
                    "lee_jeong": report.lee_jeong,
                    "macroscopicity": report.macroscopicity,
                }
                checks = [
                    CellCheck(
                        column=column,
                        computed=computed[column],
                        expected=expected.value,
                        tolerance=expected.tolerance,
                        relative=expected.relative,
                        passed=expected.accepts(computed[column]),
                    )
                    for column, expected in entry.expected.items()
                ]
                rows.append(Table1Row(label=device.label, checks=checks, **computed))
                self.logger.info("Table row computed", label=device.label, passed=all(c.passed for c in checks))

            report = Table1Report(rows=rows, passed=all(row.passed for row in rows))

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="ExperimentService",
                operation="table1",
                duration=duration,
                rows=len(rows),
                passed=report.passed,
            )
            return report

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="ExperimentService",
                operation="table1",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise

    def sweep(self, request: SweepRequest, workers: Optional[int] = None) -> SweepReport:
        """
        Measures over the Cartesian product of the request, in parallel across points.

        Results come back in input order regardless of the worker count.
        """
        start_time = time.time()

        try:
            points = [
                (n, mu, n_th, nbar, request.branch.value, request.ordering.value)
                for mu, n_th, nbar, n in itertools.product(
                    request.couplings, request.per_step_thermal, request.initial_occupations, request.steps
                )
            ]
            count = resolve_workers(workers)
            if count <= 1 or len(points) == 1:
                results = [evaluate_sweep_point(point) for point in points]
            else:
                with ProcessPoolExecutor(max_workers=count) as executor:
                    results = list(executor.map(evaluate_sweep_point, points))

            report = SweepReport(
                points=results,
                optimal_steps=optimal_steps(results),
                metadata={
                    "branch": request.branch.value,
                    "ordering": request.ordering.value,
                    "workers": count,
                },
            )

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="ExperimentService",
                operation="sweep",
                duration=duration,
                points=len(results),
                workers=count,
            )
            return report

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="ExperimentService",
                operation="sweep",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise

    def oracle_cell(self, config: ProtocolConfig) -> OracleCell:
        """Compare the engine with the Fock oracle for one configuration."""
        state, weight = self.protocol_service.run_sequence(config)
        report = self.measure_service.report(state)
        rho, oracle_weight = self.fock_oracle_service.run_sequence_fock(config)

        grid = self.grid_for(state, 81, 101)
        engine_field = self.phase_space_service.evaluate(state, grid)
        oracle_field = self.fock_oracle_service.wigner_of(rho, grid)
        sup_norm = float(np.abs(engine_field - oracle_field).max())

        x_min, x_max, p_min, p_max = bounding_box(state, settings.measure_sigma_span * np.sqrt(2))
        fine = Grid(
            x_min, x_max, p_min, p_max,
            int(np.ceil((x_max - x_min) / 0.04)) + 1,
            int(np.ceil((p_max - p_min) / 0.04)) + 1,
        )
        radius = max(abs(x_min), abs(x_max), abs(p_min), abs(p_max))
        u = np.linspace(-radius, radius, int(np.ceil(2 * radius / 0.02)) + 2)

        oracle_min, _ = self.fock_oracle_service.min_wigner(rho, report.min_w_location)
        oracle_macro, _ = self.fock_oracle_service.macroscopicity(rho, u)
        differences = {
            "min_w": abs(report.min_w - oracle_min),
            "delta": abs(report.delta - self.fock_oracle_service.negative_volume(rho, fine)),
            "lee_jeong": abs(report.lee_jeong - self.fock_oracle_service.lee_jeong(rho)),
            "macroscopicity": abs(report.macroscopicity - oracle_macro),
        }
        probability_difference = abs(weight - oracle_weight)
        passed = (
            sup_norm <= ORACLE_WIGNER_TOLERANCE
            and max(differences.values()) <= ORACLE_MEASURE_TOLERANCE
            and probability_difference <= ORACLE_PROBABILITY_TOLERANCE
        )
        return OracleCell(
            steps=config.steps,
            coupling=config.coupling,
            initial_occupation=config.initial_occupation,
            per_step_thermal=config.per_step_thermal,
            dimension=rho.dimension,
            wigner_sup_norm=sup_norm,
            measure_differences=differences,
            probability_difference=probability_difference,
            passed=passed,
        )

    def loss_check(self, config: ProtocolConfig, tolerance: float) -> LossCheck:
        """Compare a lossy Fock-basis run with the lossless one."""
        distance = self.fock_oracle_service.loss_trace_distance(config)
        lost = 0.0
        if config.input_kind is InputKind.COHERENT:
            lost = config.steps * (1 - config.efficiency) * abs(complex(config.alpha)) ** 2
        return LossCheck(
            input_kind=config.input_kind,
            steps=config.steps,
            efficiency=config.efficiency,
            lost_photon_mean=lost,
            trace_distance=distance,
            tolerance=tolerance,
            passed=distance <= tolerance,
        )

    def oracle_check(self, quick: bool = False) -> OracleCheckReport:
        """Run the engine-versus-oracle equivalence matrix."""
        start_time = time.time()

        try:
            cells = []
            for config in oracle_matrix(quick):
                cell = self.oracle_cell(config)
                self.logger.info(
                    "Oracle cell compared",
                    steps=cell.steps,
                    coupling=cell.coupling,
                    initial_occupation=cell.initial_occupation,
                    per_step_thermal=cell.per_step_thermal,
                    passed=cell.passed,
                )
                cells.append(cell)
            loss_checks = [self.loss_check(config, tolerance) for config, tolerance in LOSS_CHECKS]
            report = OracleCheckReport(
                cells=cells,
                loss_checks=loss_checks,
                wigner_tolerance=ORACLE_WIGNER_TOLERANCE,
                measure_tolerance=ORACLE_MEASURE_TOLERANCE,
                passed=all(cell.passed for cell in cells) and all(check.passed for check in loss_checks),
            )

            duration = time.time() - start_time
            log_service_operation(
                logger=self.logger,
                service="ExperimentService",
                operation="oracle_check",
                duration=duration,
                cells=len(cells),
                passed=report.passed,
            )
            return report

        except Exception as e:
            duration = time.time() - start_time
            self.logger.error(
                "Service operation failed",
                service="ExperimentService",
                operation="oracle_check",
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise
