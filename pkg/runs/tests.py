"""
Unit tests for runs app.
"""

import csv
import json
import tempfile
from pathlib import Path
from typing import Any, Dict

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from rest_framework.test import APIClient

from analysis.exceptions import AnalysisError
from analysis.models import VerdictClass
from benchmarks.adder import gen_adder
from benchmarks.models import Suite

from .exceptions import AppendOnlyError, SchemaError
from .models import Backend, ExitCode, RunRecord
from .services import RunService, case_seed

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def write_counts(path: Path, counts: Dict[str, int], **extra: Any) -> Path:
    document = {'shots': sum(counts.values()), 'counts': counts, 'backend': 'external', **extra}
    path.write_text(json.dumps(document), encoding='utf-8')
    return path


class RunRecordModelTest(TestCase):
    """Test cases for RunRecord model."""

    def setUp(self) -> None:
        """Set up test data."""
        self.record = RunRecord.objects.create(
            suite=Suite.IDENTITY,
            case_name='identity-c01x8-00',
            params={'descriptor': '(C01)^8'},
            backend=Backend.IDEAL,
            shots=8192,
            seed=1,
            counts_path='out/identity/identity-c01x8-00/x/counts.json',
            verdict_class=VerdictClass.CORRECT,
            top_state=['00', 1.0],
            tool_version='0.1.0',
        )

    def test_record_creation(self) -> None:
        """Test record creation with valid data."""
        self.assertIsNotNone(self.record.id)
        self.assertIsNotNone(self.record.created_at)
        self.assertTrue(self.record.is_correct)
        self.assertIn('identity-c01x8-00', str(self.record))

    def test_records_are_append_only(self) -> None:
        """Test stored records can be neither changed nor deleted."""
        self.record.verdict_class = VerdictClass.WRONG
        with self.assertRaises(AppendOnlyError):
            self.record.save()
        with self.assertRaises(AppendOnlyError):
            self.record.delete()
        self.assertEqual(RunRecord.objects.get().verdict_class, VerdictClass.CORRECT)


class CountsSchemaTest(SimpleTestCase):
    """Test cases for reading counts documents."""

    def setUp(self) -> None:
        """Set up test data."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)
        self.service = RunService(out_dir=self.dir / 'out')

    def test_valid_document(self) -> None:
        """Test a well-formed document loads into a counts table."""
        path = write_counts(self.dir / 'ok.json', {'00': 6, '11': 2}, date='2016-05-14')
        counts = self.service.load_counts(path)
        self.assertEqual(counts.shots, 8)
        self.assertEqual(counts.backend, 'external')
        self.assertEqual(counts.date, '2016-05-14')

    def test_malformed_json(self) -> None:
        """Test text that is not JSON is a schema error."""
        path = self.dir / 'bad.json'
        path.write_text('{"shots": 8, "counts": ', encoding='utf-8')
        with self.assertRaises(SchemaError):
            self.service.load_counts(path)

    def test_shots_mismatch(self) -> None:
        """Test counts that do not sum to shots are rejected."""
        path = self.dir / 'short.json'
        path.write_text(json.dumps({'shots': 10, 'counts': {'0': 3, '1': 3}}), encoding='utf-8')
        with self.assertRaises(SchemaError):
            self.service.load_counts(path)

    def test_bad_keys(self) -> None:
        """Test non-binary and mixed-width keys are rejected."""
        with self.assertRaises(SchemaError):
            self.service.load_counts(write_counts(self.dir / 'a.json', {'0a': 1}))
        with self.assertRaises(SchemaError):
            self.service.load_counts(write_counts(self.dir / 'b.json', {'0': 1, '10': 1}))
        with self.assertRaises(SchemaError):
            self.service.load_counts(self.dir / 'missing.json')

    def test_case_seeds(self) -> None:
        """Test case seeds are stable and differ between cases."""
        self.assertEqual(case_seed(1, 3), case_seed(1, 3))
        self.assertNotEqual(case_seed(1, 3), case_seed(1, 4))
        self.assertNotEqual(case_seed(1, 3), case_seed(2, 3))


class TranspileCommandTest(SimpleTestCase):
    """Test cases for transpiling QASM files."""

    def setUp(self) -> None:
        """Set up test data."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def write_qasm(self, name: str, body: str, width: int = 5) -> Path:
        path = self.dir / name
        path.write_text(HEADER + f'qreg q[{width}];\ncreg c[{width}];\n' + body, encoding='utf-8')
        return path

    def test_legal_circuit_passes_through(self) -> None:
        """Test a circuit that obeys the map is copied byte for byte."""
        source = self.write_qasm('legal.qasm', 'h q[0];\ncx q[1],q[2];\nmeasure q[2] -> c[2];\n')
        target = self.dir / 'legal-out.qasm'
        result = RunService().transpile(source, 'ibmqe-v1', target)
        self.assertTrue(result['passthrough'])
        self.assertFalse(result['verified'])
        self.assertEqual(target.read_bytes(), source.read_bytes())

    def test_verified_passthrough_checks_the_copy(self) -> None:
        """Test --verify on a legal circuit compares the copy and reports it verified."""
        source = self.write_qasm('legal.qasm', 'h q[0];\ncx q[1],q[2];\n')
        target = self.dir / 'legal-out.qasm'
        result = RunService().transpile(source, 'ibmqe-v1', target, verify=True)
        self.assertTrue(result['passthrough'])
        self.assertTrue(result['verified'])
        self.assertEqual(target.read_bytes(), source.read_bytes())

    def test_verify_rejects_wide_circuits_first(self) -> None:
        """Test --verify on 11 qubits fails on the width limit before the device mismatch."""
        source = self.write_qasm('wide.qasm', 'h q[0];\ncx q[0],q[10];\n', width=11)
        with self.assertRaises(CommandError) as raised:
            call_command('bench_transpile', str(source), str(self.dir / 'wide-out.qasm'),
                         coupling='ibmqe-v1', verify=True)
        self.assertEqual(raised.exception.returncode, ExitCode.INPUT_ERROR)
        self.assertIn('at most 10 qubits', str(raised.exception))
        self.assertFalse((self.dir / 'wide-out.qasm').exists())

    def test_routed_result_reports_verification(self) -> None:
        """Test a routed circuit is verified only when asked."""
        source = self.write_qasm('reversed.qasm', 'cx q[2],q[1];\n')
        service = RunService()
        self.assertFalse(service.transpile(source, 'ibmqe-v1', self.dir / 'a.qasm')['verified'])
        self.assertTrue(service.transpile(source, 'ibmqe-v1', self.dir / 'b.qasm', verify=True)['verified'])

    def test_reversed_cnot_is_expanded(self) -> None:
        """Test CX(2,1) on the star map becomes H H CX(1,2) H H and verifies."""
        source = self.write_qasm('reversed.qasm', 'cx q[2],q[1];\n')
        target = self.dir / 'reversed-out.qasm'
        call_command('bench_transpile', str(source), str(target), coupling='ibmqe-v1', verify=True)
        lines = [line for line in target.read_text(encoding='utf-8').splitlines() if line.startswith(('h ', 'cx '))]
        self.assertEqual(len(lines), 5)
        self.assertIn('cx q[1],q[2];', lines)

    def test_unparseable_input_exits_with_two(self) -> None:
        """Test a syntax error is an input error."""
        source = self.dir / 'broken.qasm'
        source.write_text(HEADER + 'qreg q[5];\ncx q[0] q[1];\n', encoding='utf-8')
        with self.assertRaises(CommandError) as raised:
            call_command('bench_transpile', str(source), str(self.dir / 'x.qasm'), coupling='ibmqe-v1')
        self.assertEqual(raised.exception.returncode, ExitCode.INPUT_ERROR)


class RunSuiteTest(TestCase):
    """Test cases for running suites end to end."""

    def setUp(self) -> None:
        """Set up test data."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = Path(self.tmp.name) / 'out'
        self.service = RunService(out_dir=self.out)

    def test_identity_ideal_all_correct(self) -> None:
        """Test the ideal identity suite passes and writes every file."""
        summary = self.service.run_suite('identity', shots=8192, seed=1)
        self.assertEqual(summary['exit_code'], ExitCode.OK)
        self.assertEqual(summary['results']['correct'], 5)
        self.assertEqual(RunRecord.objects.filter(suite=Suite.IDENTITY).count(), 5)

        case_dirs = list((self.out / 'identity' / 'identity-c01x8-00').iterdir())
        self.assertEqual(len(case_dirs), 1)
        for name in ('circuit.qasm', 'counts.json', 'verdict.json', 'oracle.json'):
            self.assertTrue((case_dirs[0] / name).exists())
        summary_path = self.out / 'identity' / summary['metadata']['timestamp'] / 'summary.json'
        self.assertTrue(summary_path.exists())

    def test_fixed_seed_is_reproducible(self) -> None:
        """Test two runs with the same seed produce identical counts."""
        self.service.run_suite('identity', shots=1024, seed=7)
        self.service.run_suite('identity', shots=1024, seed=7)
        runs = sorted((self.out / 'identity' / 'identity-c02c12-111').glob('*/counts.json'))
        self.assertEqual(len(runs), 2)
        first, second = (json.loads(path.read_text(encoding='utf-8')) for path in runs)
        self.assertEqual(first['counts'], second['counts'])

    def test_noisy_identity_fails(self) -> None:
        """Test heavy bit-flip noise breaks some verdicts and exits with one."""
        summary = self.service.run_suite('identity', backend=Backend.NOISY, shots=2048, seed=1, p_correct=0.8)
        self.assertEqual(summary['exit_code'], ExitCode.VERDICT_FAILURES)
        self.assertGreater(len(summary['failures']), 0)
        verdict_files = list((self.out / 'identity').glob('*/*/verdict.json'))
        document = json.loads(verdict_files[0].read_text(encoding='utf-8'))
        self.assertIn('predicted_error_free', document)

    def test_singlet_suite_writes_csv_and_fit(self) -> None:
        """Test the singlet suite adds correlators.csv and the pure-state fit."""
        summary = self.service.run_suite('singlet', shots=8192, seed=1)
        directory = self.out / 'singlet' / summary['metadata']['timestamp']
        with (directory / 'correlators.csv').open(encoding='utf-8') as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual(len(rows), 34)
        self.assertEqual(
            list(rows[0].keys()),
            ['theta1', 'theta2', 'f00', 'f01', 'f10', 'f11', 'F1', 'F2', 'F', 'E_theory'],
        )
        for row in rows:
            self.assertLessEqual(abs(float(row['F']) - float(row['E_theory'])), 0.11)
        fit = json.loads((directory / 'fit.json').read_text(encoding='utf-8'))
        self.assertGreater(fit['magnitudes'][0], 0.97)

    def test_noisy_without_p_correct_exits_with_two(self) -> None:
        """Test a noisy run without p_correct is an input error."""
        with self.assertRaises(CommandError) as raised:
            call_command('bench_run', suite='identity', backend='noisy', out=str(self.out))
        self.assertEqual(raised.exception.returncode, ExitCode.INPUT_ERROR)

    def test_command_exit_codes(self) -> None:
        """Test bench_run returns normally on success and exits with one on failures."""
        call_command('bench_run', suite='identity', shots=512, out=str(self.out))
        with self.assertRaises(SystemExit) as raised:
            call_command('bench_run', suite='identity', backend='noisy', p_correct=0.8, shots=2048, out=str(self.out))
        self.assertEqual(raised.exception.code, ExitCode.VERDICT_FAILURES)


class IngestTest(TestCase):
    """Test cases for judging external counts."""

    def setUp(self) -> None:
        """Set up test data."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)
        self.service = RunService(out_dir=self.dir / 'out')

    def test_identity_table_is_correct(self) -> None:
        """Test a top state at 0.661 on the input is Correct."""
        path = write_counts(self.dir / 'c01.json', {'00': 5415, '01': 1500, '10': 1277})
        document = self.service.ingest(path, 'identity-c01x8-00')
        self.assertEqual(document['class'], VerdictClass.CORRECT)
        self.assertAlmostEqual(document['frequencies']['00'], 0.661, places=3)
        self.assertTrue(Path(document['counts_path']).exists())
        self.assertEqual(RunRecord.objects.get().backend, Backend.EXTERNAL)

    def test_display_order_adder_table_is_magenta(self) -> None:
        """Test an adder table in header column order with the answer as close runner-up."""
        case = gen_adder(1, 2)
        expected = case.display(case.expected_states[0])
        others = [format(v, '04b') for v in range(16) if format(v, '04b') != expected]
        path = write_counts(self.dir / 'adder.json', {others[0]: 2802, expected: 2793, others[1]: 2597})
        document = self.service.ingest(path, case.name, columns='display')
        self.assertEqual(document['class'], VerdictClass.UNEXPECTED_SUPERPOSITION)
        self.assertEqual(document['color'], 'magenta')

    def test_width_mismatch(self) -> None:
        """Test counts over the wrong number of bits are rejected."""
        path = write_counts(self.dir / 'wide.json', {'000': 10})
        with self.assertRaises(SchemaError):
            self.service.ingest(path, 'identity-c01x8-00')

    def test_malformed_file_exits_with_two(self) -> None:
        """Test the command maps a schema error to exit code two."""
        path = self.dir / 'bad.json'
        path.write_text('not json', encoding='utf-8')
        with self.assertRaises(CommandError) as raised:
            call_command('bench_ingest', str(path), case='identity-c01x8-00', out=str(self.dir / 'out'))
        self.assertEqual(raised.exception.returncode, ExitCode.INPUT_ERROR)


class ReportTest(TestCase):
    """Test cases for history reports."""

    def setUp(self) -> None:
        """Set up test data."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)
        self.service = RunService(out_dir=self.dir / 'out')

    def ingest(self, top: int, name: str) -> None:
        path = write_counts(self.dir / name, {'00': top, '01': 8192 - top})
        self.service.ingest(path, 'identity-c01x8-00')

    def test_identical_runs_are_stationary(self) -> None:
        """Test two identical stored runs are stationary."""
        self.ingest(5415, 'a.json')
        self.ingest(5415, 'b.json')
        report = self.service.report(stationarity=True)
        entry = report['cases']['identity-c01x8-00']
        self.assertEqual(len(entry['runs']), 2)
        self.assertEqual(entry['stationarity']['verdict'], 'stationary')
        self.assertEqual(report['exit_code'], ExitCode.OK)

    def test_dated_runs_are_non_stationary(self) -> None:
        """Test five dated runs spread by 0.12 are flagged."""
        for index, f in enumerate((0.661, 0.700, 0.642, 0.580, 0.628)):
            self.ingest(round(f * 8192), f'run{index}.json')
        report = self.service.report(stationarity=True)
        stationarity = report['cases']['identity-c01x8-00']['stationarity']
        self.assertEqual(stationarity['verdict'], 'non-stationary')
        self.assertAlmostEqual(stationarity['max_delta'], 0.12, places=3)
        self.assertEqual(report['exit_code'], ExitCode.VERDICT_FAILURES)

    def test_single_run_is_inconclusive(self) -> None:
        """Test one stored run gives an inconclusive stationarity."""
        self.ingest(5415, 'a.json')
        report = self.service.report(stationarity=True)
        self.assertEqual(report['cases']['identity-c01x8-00']['stationarity']['verdict'], 'inconclusive')

    def test_empty_history(self) -> None:
        """Test an empty directory is an error and the command exits with two."""
        with self.assertRaises(AnalysisError):
            self.service.report()
        with self.assertRaises(CommandError) as raised:
            call_command('bench_report', str(self.dir / 'out'), stationarity=True)
        self.assertEqual(raised.exception.returncode, ExitCode.INPUT_ERROR)


class RunRecordAPITest(TestCase):
    """Test cases for the read-only run API."""

    def setUp(self) -> None:
        """Set up test data."""
        self.client = APIClient()
        for case_name, suite in (('identity-c01x8-00', Suite.IDENTITY), ('code513-q2-0', Suite.CODE513)):
            RunRecord.objects.create(
                suite=suite,
                case_name=case_name,
                shots=8192,
                counts_path='counts.json',
                verdict_class=VerdictClass.CORRECT,
                tool_version='0.1.0',
            )

    def test_list_and_filter(self) -> None:
        """Test listing and filtering by case name and suite."""
        response = self.client.get('/api/runs/')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json()['count'], 2)

        response = self.client.get('/api/runs/', {'suite': 'code513'})
        self.assertEqual([r['case_name'] for r in response.json()['results']], ['code513-q2-0'])

        response = self.client.get('/api/runs/', {'case_name': 'identity-c01x8-00'})
        self.assertEqual(response.json()['count'], 1)

    def test_read_only(self) -> None:
        """Test writes are not allowed."""
        response = self.client.post('/api/runs/', {'case_name': 'x'}, format='json')
        self.assertEqual(response.status_code, 405)
