"""Test cases for verdicts and the certificate format."""

import json

from ot_manifolds import __version__
from ot_manifolds.certificates import EXIT_CODES, Certificate, CheckResult, Verdict
from ot_manifolds.exact.precision import PrecisionPolicy


def make_certificate(*verdicts):
    certificate = Certificate('signature', {'field': {'label': 'x'}}, PrecisionPolicy(128), 0)
    for index, verdict in enumerate(verdicts):
        certificate.add(CheckResult(f'check{index}', verdict, {'index': index}))
    return certificate


class TestVerdict:
    """Test cases for verdict combination."""

    def test_fail_dominates(self):
        assert Verdict.combine([Verdict.PASS, Verdict.INCONCLUSIVE, Verdict.FAIL]) == Verdict.FAIL

    def test_inconclusive_dominates_pass(self):
        assert Verdict.combine([Verdict.PASS, Verdict.INCONCLUSIVE]) == Verdict.INCONCLUSIVE

    def test_empty_is_pass(self):
        assert Verdict.combine([]) == Verdict.PASS

    def test_exit_codes(self):
        assert [EXIT_CODES[v] for v in (Verdict.PASS, Verdict.FAIL, Verdict.INCONCLUSIVE)] == [0, 1, 2]


class TestCertificate:
    """Test cases for canonical serialization."""

    def test_overall_verdict(self):
        certificate = make_certificate(Verdict.PASS, Verdict.INCONCLUSIVE)
        assert certificate.verdict == Verdict.INCONCLUSIVE
        assert certificate.exit_code == 2

    def test_canonical_json(self):
        text = make_certificate(Verdict.PASS).to_json()
        assert text.endswith('}\n')
        data = json.loads(text)
        assert text == json.dumps(data, sort_keys=True, indent=2) + '\n'
        assert data['version'] == __version__
        assert data['policy'] == {'working_bits': 128, 'tolerance_bits': 64}
        assert data['verdicts'][0] == {'name': 'check0', 'verdict': 'Pass',
                                       'evidence': {'index': 0}}

    def test_message_only_when_present(self):
        check = CheckResult('admissibility', Verdict.FAIL, {}, 'field has no real embedding')
        assert check.to_dict()['message'] == 'field has no real embedding'
        assert 'message' not in CheckResult('x', Verdict.PASS).to_dict()

    def test_write(self, tmp_path):
        path = tmp_path / 'certificate.json'
        certificate = make_certificate(Verdict.FAIL)
        text = certificate.write(str(path))
        assert path.read_bytes() == text.encode()
        assert certificate.write() == text
