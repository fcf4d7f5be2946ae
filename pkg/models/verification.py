from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class CheckResult:
    """Outcome of one verification criterion"""

    name: str
    passed: bool
    error_message: Optional[str] = None
    details: dict = field(default_factory=dict)
    category: str = 'general'

    @classmethod
    def create(cls, name, passed, error_message=None, details=None, category='general'):
        return cls(
            name=name,
            passed=bool(passed),
            error_message=None if passed else error_message,
            details=details or {},
            category=category
        )

    def get_error_summary(self):
        """Get a summary of the failure"""
        if self.passed:
            return None
        summary = f'{self.name} check failed'
        if self.error_message:
            summary += f': {self.error_message}'
        return summary

    def to_dict(self):
        return {
            'name': self.name,
            'category': self.category,
            'passed': self.passed,
            'error_message': self.error_message,
            'details': self.details
        }

    def __repr__(self):
        status = 'PASS' if self.passed else 'FAIL'
        return f'<CheckResult {self.name} - {status}>'


@dataclass
class VerificationReport:
    level: str
    checks: List[CheckResult] = field(default_factory=list)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self):
        return {
            'success': self.passed,
            'level': self.level,
            'checks_run': len(self.checks),
            'checks_failed': len(self.failures),
            'checks': [check.to_dict() for check in self.checks]
        }
