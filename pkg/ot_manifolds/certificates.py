"""Verdicts, check results and the canonical certificate format."""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

from . import __version__
from .exact.precision import PrecisionPolicy


class Verdict(str, Enum):
    PASS = 'Pass'
    FAIL = 'Fail'
    INCONCLUSIVE = 'Inconclusive'

    @classmethod
    def combine(cls, verdicts: Iterable["Verdict"]) -> "Verdict":
        """Fail dominates Inconclusive, which dominates Pass."""
        verdicts = list(verdicts)
        if cls.FAIL in verdicts:
            return cls.FAIL
        if cls.INCONCLUSIVE in verdicts:
            return cls.INCONCLUSIVE
        return cls.PASS

    @classmethod
    def of(cls, passed: bool) -> "Verdict":
        return cls.PASS if passed else cls.FAIL


EXIT_CODES = {
    Verdict.PASS: 0,
    Verdict.FAIL: 1,
    Verdict.INCONCLUSIVE: 2,
}
EXIT_INPUT_ERROR = 3


@dataclass
class CheckResult:
    """One named sub-check with its evidence (JSON-ready values only)."""

    name: str
    verdict: Verdict
    evidence: Dict[str, Any] = field(default_factory=dict)
    message: str = ''

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def to_dict(self) -> Dict[str, Any]:
        data = {'name': self.name, 'verdict': self.verdict.value, 'evidence': self.evidence}
        if self.message:
            data['message'] = self.message
        return data


@dataclass
class Certificate:
    command: str
    inputs: Dict[str, Any]
    policy: PrecisionPolicy
    seed: int
    checks: List[CheckResult] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    version: str = __version__

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def extend(self, checks: Iterable[CheckResult]):
        for check in checks:
            self.add(check)

    @property
    def verdict(self) -> Verdict:
        return Verdict.combine(check.verdict for check in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'inputs': self.inputs,
            'policy': self.policy.to_dict(),
            'seed': self.seed,
            'verdict': self.verdict.value,
            'verdicts': [check.to_dict() for check in self.checks],
            'results': self.results,
            'version': self.version,
        }

    def to_json(self) -> str:
        """Canonical form: sorted keys, two-space indent, trailing newline."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=True) + '\n'

    def write(self, path: Optional[str] = None) -> str:
        """Write the canonical JSON to ``path`` when given.

        Args:
            path: destination file; nothing is written when None

        Returns:
            str: the canonical JSON text

        Raises:
            OSError: If the file cannot be written
        """
        text = self.to_json()
        if path:
            with open(path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(text)
        return text
