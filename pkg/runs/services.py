"""
Run services for qbench.

Runs are written under the output directory as

    <out>/<suite>/<case>/<timestamp>/{circuit.qasm, counts.json, verdict.json, oracle.json}

and never overwritten, so dated runs of the same case accumulate for the
stationarity report. Suite-level files (summary.json, and for the singlet
suite correlators.csv and fit.json) go to <out>/<suite>/<timestamp>/.
"""

import csv
import json
import logging
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from celery import group
from django.conf import settings

from analysis.exceptions import AnalysisError, FitError
from analysis.fitting import fit_pure_state
from analysis.models import Stationarity, Verdict, VerdictClass
from analysis.services import AnalysisService
from benchmarks.codes import postselect
from benchmarks.models import BenchmarkCase, PostselectionResult, Suite
from benchmarks.services import BenchmarkService
from benchmarks.singlet import correlators_from_frequencies
from circuits.models import Circuit, CouplingMap, GateKind
from circuits.services import CircuitService
from qasm.services import QasmService
from simulator.exceptions import SimulationError
from simulator.models import CountsTable, NoiseChannel, NoiseModel
from simulator.services import SimulatorService
from transpiler.exceptions import VerificationError
from transpiler.services import TranspilerService

from .api import CountsDocumentSerializer
from .exceptions import SchemaError
from .models import Backend, ColumnOrder, ExitCode, RunRecord

logger = logging.getLogger(__name__)

TIMESTAMP_FORMAT = '%Y%m%dT%H%M%S.%fZ'
SINGLET_CSV_COLUMNS = ['theta1', 'theta2', 'f00', 'f01', 'f10', 'f11', 'F1', 'F2', 'F', 'E_theory']


def run_timestamp() -> str:
    return datetime.now(timezone.utc).strftime(TIMESTAMP_FORMAT)


def case_seed(suite_seed: int, index: int) -> int:
    """Seed of case ``index``, independent of which worker runs it."""
    state = np.random.SeedSequence(suite_seed, spawn_key=(index,)).generate_state(1, dtype=np.uint32)
    return int(state[0])


def tool_version() -> str:
    from qbench import __version__
    return __version__


def write_json(path: Path, document: Any) -> None:
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + '\n', encoding='utf-8')


def error_slots(circuit: Circuit) -> int:
    """Qubit slots a per-gate error channel can hit: one per operand of each unitary gate."""
    return sum(len(g.qubits) for g in circuit.unitary_gates if g.kind != GateKind.BARRIER)


class RunService:
    """
    Service for executing suites, ingesting hardware counts and reporting history.

    Each case is executed, judged and written independently; the suite
    summary is written last.
    """

    def __init__(self, out_dir: Optional[Union[str, Path]] = None, k_se: Optional[float] = None) -> None:
        """Initialize the run service."""
        self.out_dir = Path(out_dir if out_dir is not None else settings.QBENCH_OUT)
        self.analysis = AnalysisService(k_se=k_se)
        self.benchmarks = BenchmarkService()
        self.circuits = CircuitService()
        self.qasm = QasmService()
        self.simulator = SimulatorService()
        self.transpiler = TranspilerService()

    @property
    def k_se(self) -> float:
        return self.analysis.k_se

    def resolve_coupling(self, coupling: Optional[str]) -> Optional[CouplingMap]:
        """Built-in device name or device JSON path to a coupling map; None passes through."""
        if not coupling:
            return None
        coupling_map, _ = self.circuits.load_device(coupling)
        return coupling_map

    def execute(
        self,
        case: BenchmarkCase,
        backend: str,
        shots: int,
        seed: int,
        noise: Optional[NoiseModel] = None,
        coupling: Optional[CouplingMap] = None,
    ) -> Tuple[Circuit, CountsTable]:
        """
        Simulate one case, routed onto ``coupling`` first if one is given.

        Returns:
            Tuple of (executed circuit, counts)

        Raises:
            SimulationError: If the backend is unknown or a noisy run has no noise model
        """
        circuit = case.circuit
        if coupling is not None:
            circuit = self.transpiler.route(circuit, coupling).circuit

        if backend == Backend.IDEAL:
            counts = self.simulator.sample(circuit, shots, seed)
        elif backend == Backend.NOISY:
            if noise is None:
                raise SimulationError("The noisy backend needs a noise model")
            counts = self.simulator.run_noisy(circuit, noise, shots, seed)
        else:
            raise SimulationError(f"Unknown backend '{backend}', expected ideal or noisy")
        return circuit, replace(counts, circuit_name=case.name)

    def evaluate(self, case: BenchmarkCase, counts: CountsTable) -> Tuple[Verdict, Optional[PostselectionResult]]:
        """Verdict against the oracle, plus postselection for cases with a codeword table."""
        verdict = self.analysis.verdict(counts, case.oracle)
        postselection = None
        if case.codewords is not None and counts.width == len(next(iter(case.codewords.logical0))):
            postselection = postselect(counts, case.codewords)
        return verdict, postselection

    def verdict_document(
        self,
        case: BenchmarkCase,
        counts: CountsTable,
        verdict: Verdict,
        postselection: Optional[PostselectionResult],
        circuit: Optional[Circuit] = None,
    ) -> Dict[str, Any]:
        document = verdict.to_dict()
        document['case'] = case.name
        document['frequencies'] = {
            key: f for key, f in sorted(self.analysis.frequencies(counts).items())
        }
        document['display_top_states'] = [[case.display(key), f] for key, f in verdict.top_states[:8]]
        document['columns'] = list(case.qubit_column_map)
        if postselection is not None:
            document['postselection'] = postselection.to_dict()
        p_correct = counts.metadata.get('p_correct')
        if p_correct is not None:
            slots = error_slots(circuit or case.circuit)
            document['predicted_error_free'] = self.analysis.predict_success(float(p_correct), slots)
            document['observed_error_free'] = counts.metadata.get('error_free_shots', 0) / counts.shots
        return document

    def persist(
        self,
        case: BenchmarkCase,
        circuit: Circuit,
        counts: CountsTable,
        document: Dict[str, Any],
        stamp: str,
    ) -> Path:
        """
        Write the four run files into a fresh directory.

        Returns:
            Path of counts.json

        Raises:
            FileExistsError: If a run with this timestamp already exists
        """
        run_dir = self.out_dir / str(case.family) / case.name / stamp
        run_dir.mkdir(parents=True, exist_ok=False)
        (run_dir / 'circuit.qasm').write_text(self.qasm.serialize(circuit), encoding='utf-8')
        write_json(run_dir / 'counts.json', counts.to_dict())
        write_json(run_dir / 'oracle.json', case.oracle_document())
        write_json(run_dir / 'verdict.json', document)
        return run_dir / 'counts.json'

    def record(self, case: BenchmarkCase, counts: CountsTable, verdict: Verdict, counts_path: Path) -> RunRecord:
        top_key, top_freq = verdict.top_states[0]
        return RunRecord.objects.create(
            suite=case.family,
            case_name=case.name,
            params=case.params,
            backend=counts.backend if counts.backend in Backend.values else Backend.EXTERNAL,
            shots=counts.shots,
            seed=counts.seed,
            counts_path=str(counts_path),
            verdict_class=verdict.verdict_class,
            top_state=[top_key, top_freq],
            tool_version=tool_version(),
        )

    def run_case(
        self,
        suite: str,
        index: int,
        backend: str,
        shots: int,
        seed: int,
        stamp: str,
        p_correct: Optional[float] = None,
        channel: str = NoiseChannel.BIT_FLIP,
        coupling: Optional[str] = None,
    ) -> Dict[str, Any]:
        """
        Execute, judge, write and record case ``index`` of a suite.

        Args:
            suite: Suite name, 'all' included
            index: Position of the case in the suite
            backend: 'ideal' or 'noisy'
            shots: Shots per case
            seed: Suite seed; the case seed is derived from it and ``index``
            stamp: Run timestamp shared by every case of the run
            p_correct: Per-gate success probability of the noisy backend
            channel: Noise channel of the noisy backend
            coupling: Device to route onto before execution

        Returns:
            JSON-ready outcome with case name, verdict class and top state
        """
        case = self.benchmarks.build_suite(suite)[index]
        noise = NoiseModel(p_correct, NoiseChannel(channel)) if backend == Backend.NOISY and p_correct is not None else None
        circuit, counts = self.execute(
            case, backend, shots, case_seed(seed, index), noise, self.resolve_coupling(coupling)
        )
        verdict, postselection = self.evaluate(case, counts)
        document = self.verdict_document(case, counts, verdict, postselection, circuit)
        counts_path = self.persist(case, circuit, counts, document, stamp)
        self.record(case, counts, verdict, counts_path)

        outcome: Dict[str, Any] = {
            'case': case.name,
            'family': str(case.family),
            'index': index,
            'verdict': str(verdict.verdict_class.value),
            'top_state': list(verdict.top_states[0]),
            'counts_path': str(counts_path),
            'params': case.params,
        }
        if case.family == Suite.SINGLET:
            outcome['frequencies'] = self.analysis.frequencies(counts)
        if postselection is not None:
            outcome['postselection'] = postselection.to_dict()
        return outcome

    def run_suite(
        self,
        suite: str,
        backend: str = Backend.IDEAL,
        shots: Optional[int] = None,
        seed: Optional[int] = None,
        p_correct: Optional[float] = None,
        channel: str = NoiseChannel.BIT_FLIP,
        coupling: Optional[str] = None,
    ) -> Dict[str, Any]:
        """
        Run every case of a suite as a group of Celery tasks.

        Args:
            suite: Suite name or 'all'
            backend: 'ideal' or 'noisy'
            shots: Shots per case (default QBENCH_SHOTS)
            seed: Suite seed (default QBENCH_SEED)
            p_correct: Required for the noisy backend
            channel: Noise channel of the noisy backend
            coupling: Device to route onto before execution

        Returns:
            Summary with checked, correct, failed and errors counts, the
            failure list and the exit code

        Raises:
            BenchmarkError: If the suite name is unknown
            SimulationError: If a noisy run has no p_correct
        """
        from .tasks import execute_case

        shots = int(shots if shots is not None else settings.QBENCH_SHOTS)
        seed = int(seed if seed is not None else settings.QBENCH_SEED)
        if backend == Backend.NOISY:
            if p_correct is None:
                raise SimulationError("The noisy backend needs --p-correct")
            NoiseModel(p_correct, NoiseChannel(channel))
        self.resolve_coupling(coupling)

        cases = self.benchmarks.build_suite(suite)
        stamp = run_timestamp()
        options = {
            'backend': str(backend),
            'shots': shots,
            'seed': seed,
            'stamp': stamp,
            'p_correct': p_correct,
            'channel': str(channel),
            'coupling': coupling,
        }
        logger.info(f"Starting suite '{suite}': {len(cases)} cases, {options}")

        job = group(
            execute_case.s(suite, index, str(self.out_dir), self.k_se, options) for index in range(len(cases))
        ).apply_async()

        results: Dict[str, int] = {
            'checked': 0,
            'correct': 0,
            'failed': 0,
            'errors': 0,
        }
        failures: List[Dict[str, Any]] = []
        outcomes: List[Dict[str, Any]] = []
        for case, async_result in zip(cases, job.results):
            results['checked'] += 1
            try:
                outcome = async_result.get(disable_sync_subtasks=False)
            except Exception as e:
                logger.error(f"Error running case '{case.name}': {e}")
                results['errors'] += 1
                failures.append({'case': case.name, 'error': str(e)})
                continue
            outcomes.append(outcome)
            if outcome['verdict'] == VerdictClass.CORRECT:
                results['correct'] += 1
            else:
                results['failed'] += 1
                failures.append({'case': outcome['case'], 'verdict': outcome['verdict'], 'top_state': outcome['top_state']})

        suite_dir = self.out_dir / suite / stamp
        suite_dir.mkdir(parents=True, exist_ok=True)
        extras: Dict[str, Any] = {}
        singlet = [o for o in outcomes if o['family'] == Suite.SINGLET]
        if singlet:
            extras = self.write_singlet_extras(singlet, self.out_dir / Suite.SINGLET / stamp)

        exit_code = ExitCode.OK if results['correct'] == results['checked'] else ExitCode.VERDICT_FAILURES
        summary = {
            'suite': suite,
            'options': {key: value for key, value in options.items() if key != 'stamp'},
            'k_se': self.k_se,
            'results': results,
            'failures': failures,
            'cases': [{'case': o['case'], 'verdict': o['verdict'], 'top_state': o['top_state']} for o in outcomes],
            'exit_code': int(exit_code),
            'metadata': {'timestamp': stamp, 'tool_version': tool_version()},
            **extras,
        }
        write_json(suite_dir / 'summary.json', summary)
        logger.info(f"Suite '{suite}' completed: {results}")
        return summary

    def write_singlet_extras(self, outcomes: List[Dict[str, Any]], directory: Path) -> Dict[str, Any]:
        """
        Write correlators.csv and the pure-state fit of the singlet runs.

        Returns:
            Paths of the written files and the fitted magnitudes
        """
        directory.mkdir(parents=True, exist_ok=True)
        rows = []
        for outcome in sorted(outcomes, key=lambda o: o['index']):
            freqs = outcome['frequencies']
            correlators = correlators_from_frequencies(freqs)
            params = outcome['params']
            rows.append({
                'theta1': params['theta1'],
                'theta2': params['theta2'],
                **{f'f{key}': freqs.get(key, 0.0) for key in ('00', '01', '10', '11')},
                'F1': correlators.F1,
                'F2': correlators.F2,
                'F': correlators.F,
                'E_theory': params['E_theory'],
            })

        csv_path = directory / 'correlators.csv'
        with csv_path.open('w', newline='', encoding='utf-8') as handle:
            writer = csv.DictWriter(handle, fieldnames=SINGLET_CSV_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)

        extras: Dict[str, Any] = {'correlators_csv': str(csv_path)}
        dataset = [(r['theta1'], r['theta2'], r['F1'], r['F2'], r['F']) for r in rows]
        try:
            fit = fit_pure_state(dataset)
        except FitError as e:
            logger.error(f"Singlet fit failed: {e}")
            if e.best is None:
                return extras
            fit = e.best
        except AnalysisError as e:
            logger.warning(f"Singlet fit skipped: {e}")
            return extras
        write_json(directory / 'fit.json', fit.to_dict())
        extras['fit'] = fit.to_dict()
        return extras

    def load_counts(self, path: Union[str, Path]) -> CountsTable:
        """
        Read and schema-check a counts JSON document.

        Raises:
            SchemaError: If the file is unreadable, not JSON, or violates the schema
        """
        path = Path(path)
        try:
            document = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
            raise SchemaError(f"Cannot read counts file {path}: {e}") from e
        if not isinstance(document, dict):
            raise SchemaError(f"Counts file {path} must hold a JSON object")

        serializer = CountsDocumentSerializer(data=document)
        if not serializer.is_valid():
            raise SchemaError(f"Counts file {path} violates the counts schema: {dict(serializer.errors)}")
        try:
            return CountsTable.from_dict(dict(serializer.validated_data))
        except SimulationError as e:
            raise SchemaError(str(e)) from e

    def ingest(
        self,
        path: Union[str, Path],
        case_name: str,
        columns: str = ColumnOrder.CANONICAL,
    ) -> Dict[str, Any]:
        """
        Judge external counts against a benchmark case and store them as a run.

        Args:
            path: Counts JSON file
            case_name: Name of the benchmark case the counts belong to
            columns: Key order of the file, 'canonical' or 'display'

        Returns:
            The verdict document, with the path of the stored counts

        Raises:
            SchemaError: If the file violates the schema or does not fit the case
            BenchmarkError: If the case does not exist
        """
        case = self.benchmarks.find_case(case_name)
        counts = self.load_counts(path)
        if counts.width != len(case.measured):
            raise SchemaError(
                f"Counts have {counts.width}-bit outcomes but case '{case.name}' measures {len(case.measured)} bits"
            )
        order = ColumnOrder(columns)
        if order == ColumnOrder.DISPLAY:
            counts = replace(counts, counts={case.canonical(key): value for key, value in counts.counts.items()})
        counts = replace(counts, circuit_name=case.name)

        verdict, postselection = self.evaluate(case, counts)
        document = self.verdict_document(case, counts, verdict, postselection)
        counts_path = self.persist(case, case.circuit, counts, document, run_timestamp())
        self.record(case, counts, verdict, counts_path)
        logger.info(f"Ingested {path} for '{case.name}': {verdict.verdict_class.value}")
        return {**document, 'counts_path': str(counts_path)}

    def transpile(
        self,
        source: Union[str, Path],
        coupling: str,
        target: Union[str, Path],
        verify: bool = False,
    ) -> Dict[str, Any]:
        """
        Route a QASM file onto a device and write the result.

        A circuit that already obeys the coupling map is copied byte for byte.

        Returns:
            Dictionary with the layout, routing metadata and verification status

        Raises:
            ParseError: If the input cannot be parsed
            UnroutableError: If the circuit cannot be routed
            VerificationError: If --verify finds the routed circuit inequivalent
            SimulationError: If --verify is asked for a circuit too wide to check
        """
        source, target = Path(source), Path(target)
        circuit = self.qasm.load(source)
        coupling_map = self.resolve_coupling(coupling)
        assert coupling_map is not None
        limit = self.transpiler.simulator.max_unitary_qubits
        if verify and circuit.num_qubits > limit:
            raise SimulationError(
                f"--verify supports circuits of at most {limit} qubits; '{source.name}' has {circuit.num_qubits}"
            )

        if circuit.num_qubits == coupling_map.num_qubits and not self.circuits.validate_coupling(circuit, coupling_map):
            target.write_bytes(source.read_bytes())
            logger.info(f"{source} already obeys {coupling}; copied unchanged")
            verified = False
            if verify:
                verified = self.transpiler.verify_equivalence(
                    circuit.without_measurements(), self.qasm.load(target).without_measurements()
                )
                if not verified:
                    raise VerificationError(f"Copy of '{circuit.name}' is not equivalent to the input")
            return {
                'layout': list(range(circuit.num_qubits)),
                'metadata': {'swaps': 0},
                'verified': verified,
                'passthrough': True,
            }

        result = self.transpiler.route(circuit, coupling_map)
        routed, layout = result
        verified = False
        if verify:
            verified = self.transpiler.verify_equivalence(
                circuit.without_measurements(), routed.without_measurements(), layout
            )
            if not verified:
                raise VerificationError(f"Routed '{circuit.name}' is not equivalent to the input")
        target.write_text(self.qasm.serialize(routed), encoding='utf-8')
        return {'layout': layout.to_list(), 'metadata': result.metadata, 'verified': verified, 'passthrough': False}

    def history(self, directory: Optional[Union[str, Path]] = None) -> Dict[str, List[Dict[str, Any]]]:
        """
        Collect stored runs per case, oldest first.

        Returns:
            Mapping case name -> list of runs with timestamp, counts and verdict

        Raises:
            SchemaError: If a stored counts file is unreadable
        """
        root = Path(directory) if directory is not None else self.out_dir
        runs: Dict[str, List[Dict[str, Any]]] = {}
        for counts_path in sorted(root.glob('*/*/*/counts.json')):
            run_dir = counts_path.parent
            case_name = run_dir.parent.name
            verdict_path = run_dir / 'verdict.json'
            verdict = json.loads(verdict_path.read_text(encoding='utf-8')) if verdict_path.exists() else {}
            runs.setdefault(case_name, []).append({
                'timestamp': run_dir.name,
                'counts': self.load_counts(counts_path),
                'verdict': verdict.get('class', ''),
            })
        for entries in runs.values():
            entries.sort(key=lambda entry: entry['timestamp'])
        return runs

    def report(self, directory: Optional[Union[str, Path]] = None, stationarity: bool = False) -> Dict[str, Any]:
        """
        Per-case history table and, optionally, a stationarity verdict per case.

        Returns:
            Report with one entry per case and the exit code: 1 if any case
            is non-stationary, else 0

        Raises:
            AnalysisError: If the history holds no runs
        """
        history = self.history(directory)
        if not history:
            raise AnalysisError(f"No stored runs under {directory or self.out_dir}")

        cases: Dict[str, Any] = {}
        exit_code = ExitCode.OK
        for case_name, entries in sorted(history.items()):
            rows = []
            for entry in entries:
                counts: CountsTable = entry['counts']
                top_key, top_freq = self.analysis.ranked(self.analysis.frequencies(counts))[0]
                rows.append({
                    'timestamp': entry['timestamp'],
                    'backend': counts.backend,
                    'shots': counts.shots,
                    'top_state': top_key,
                    'frequency': top_freq,
                    'verdict': entry['verdict'],
                })
            cases[case_name] = {'runs': rows}
            if stationarity:
                report = self.analysis.stationarity([entry['counts'] for entry in entries])
                cases[case_name]['stationarity'] = report.to_dict()
                if report.verdict == Stationarity.NON_STATIONARY:
                    exit_code = ExitCode.VERDICT_FAILURES

        logger.info(f"Report over {len(cases)} cases")
        return {'cases': cases, 'k_se': self.k_se, 'exit_code': int(exit_code)}
