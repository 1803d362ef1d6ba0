"""Validation of configuration and spec files."""

from pathlib import Path
from typing import Any, Dict, List, Optional

import sympy
import yaml

from .exact.polynomial import IntPolynomial
from .logging_config import get_logger

logger = get_logger(__name__)


class ValidationError(Exception):
    """Custom exception for validation errors."""
    pass


class SpecError(ValidationError):
    """Malformed spec file; ``location`` is a dotted path such as generators[1][2]."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


def _child(location: str, key) -> str:
    if isinstance(key, int):
        return f"{location}[{key}]"
    return f"{location}.{key}" if location else str(key)


class Validator:
    """Validates spec documents and configuration."""

    LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
    MIN_BITS = 16

    @classmethod
    def load_spec(cls, path: str) -> Dict[str, Any]:
        """Parse a YAML or JSON spec file into a mapping.

        Args:
            path: spec file; JSON parses as YAML

        Returns:
            Dict[str, Any]: top-level mapping

        Raises:
            SpecError: If the file is missing, unparsable or not a mapping
        """
        spec_path = Path(path)
        if not spec_path.is_file():
            raise SpecError('', f"Spec file not found: {path}")
        try:
            with open(spec_path, 'r') as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise SpecError('', f"Cannot parse {path}: {e}")
        if not isinstance(data, dict):
            raise SpecError('', f"Spec file {path} must contain a mapping")
        return data

    @classmethod
    def require(cls, spec: Dict[str, Any], key: str, location: str = '') -> Any:
        if not isinstance(spec, dict):
            raise SpecError(location, "expected a mapping")
        if key not in spec:
            raise SpecError(_child(location, key), "missing required key")
        return spec[key]

    @classmethod
    def validate_coefficient(cls, value: Any, location: str) -> sympy.Rational:
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise SpecError(location, f"coefficient must be an integer or a decimal string, got {value!r}")
        try:
            result = sympy.Rational(value)
        except (TypeError, ValueError, sympy.SympifyError):
            raise SpecError(location, f"invalid coefficient {value!r}")
        if not result.is_Rational:
            raise SpecError(location, f"coefficient {value!r} is not rational")
        return result

    @classmethod
    def validate_coefficients(cls, values: Any, location: str) -> List[sympy.Rational]:
        if not isinstance(values, list) or not values:
            raise SpecError(location, "expected a non-empty coefficient array")
        return [cls.validate_coefficient(v, _child(location, i)) for i, v in enumerate(values)]

    @classmethod
    def validate_defining(cls, values: Any, location: str) -> IntPolynomial:
        """Ascending coefficients of a monic integer polynomial of degree >= 2.

        Raises:
            SpecError: At ``location`` if the array is not such a polynomial
        """
        coeffs = cls.validate_coefficients(values, location)
        for i, c in enumerate(coeffs):
            if c.q != 1:
                raise SpecError(_child(location, i), f"coefficient {c} is not an integer")
        poly = IntPolynomial.from_coefficients(coeffs)
        if poly.degree < 2:
            raise SpecError(location, "defining polynomial must have degree >= 2")
        if not poly.is_monic or len(coeffs) != poly.degree + 1:
            raise SpecError(location, "defining polynomial must be monic (last coefficient 1)")
        return poly

    @classmethod
    def validate_field_spec(cls, spec: Dict[str, Any], location: str = '') -> Dict[str, Any]:
        """Either a nested ``field`` mapping or top-level ``defining``/``label``.

        Args:
            spec: loaded spec mapping
            location: dotted prefix for error locations

        Returns:
            Dict with ``defining`` (IntPolynomial), ``label`` and
            ``assert_irreducible`` (set by ``irreducible: asserted``)

        Raises:
            SpecError: If a key is missing or malformed
        """
        if isinstance(spec, dict) and 'field' in spec:
            field_spec, location = spec['field'], _child(location, 'field')
        else:
            field_spec = spec
        defining = cls.validate_defining(cls.require(field_spec, 'defining', location),
                                         _child(location, 'defining'))
        label = field_spec.get('label', '')
        if not isinstance(label, str):
            raise SpecError(_child(location, 'label'), "label must be a string")
        irreducible = field_spec.get('irreducible')
        if irreducible not in (None, 'asserted'):
            raise SpecError(_child(location, 'irreducible'),
                            "irreducible may only be 'asserted'")
        return {'defining': defining, 'label': label,
                'assert_irreducible': irreducible == 'asserted'}

    @classmethod
    def validate_residue(cls, values: Any, degree: int, location: str) -> List[sympy.Rational]:
        coeffs = cls.validate_coefficients(values, location)
        if len(coeffs) > degree:
            raise SpecError(location, f"residue has {len(coeffs)} coefficients, field degree is {degree}")
        return coeffs

    @classmethod
    def validate_residues(cls, values: Any, degree: int, location: str,
                          allow_empty: bool = False) -> List[List[sympy.Rational]]:
        if not isinstance(values, list) or (not values and not allow_empty):
            raise SpecError(location, "expected a list of residue arrays")
        return [cls.validate_residue(v, degree, _child(location, i)) for i, v in enumerate(values)]

    @classmethod
    def validate_matrix(cls, values: Any, location: str) -> List[List[int]]:
        """Nine integers, row-major."""
        if not isinstance(values, list) or len(values) != 9:
            raise SpecError(location, "matrix must be a list of 9 integers (row-major)")
        entries = []
        for i, v in enumerate(values):
            if isinstance(v, bool) or not isinstance(v, int):
                raise SpecError(_child(location, i), f"matrix entry {v!r} is not an integer")
            entries.append(v)
        return [entries[0:3], entries[3:6], entries[6:9]]

    @classmethod
    def validate_policy(cls, spec: Dict[str, Any], location: str = '') -> Optional[int]:
        """Optional ``policy: {bits: int}``; returns the bits or None."""
        policy = spec.get('policy') if isinstance(spec, dict) else None
        if policy is None:
            return None
        location = _child(location, 'policy')
        if not isinstance(policy, dict):
            raise SpecError(location, "policy must be a mapping")
        bits = policy.get('bits')
        if bits is None:
            return None
        if isinstance(bits, bool) or not isinstance(bits, int) or bits < cls.MIN_BITS:
            raise SpecError(_child(location, 'bits'), f"bits must be an integer >= {cls.MIN_BITS}")
        return bits

    @classmethod
    def validate_config(cls, config: dict) -> bool:
        """Validate configuration structure and value ranges."""
        for section in ('precision', 'checks', 'search', 'monitoring'):
            if not isinstance(config.get(section), dict):
                raise ValidationError(f"Missing required config section: {section}")

        bits = config['precision'].get('working_bits')
        if not isinstance(bits, int) or bits < cls.MIN_BITS:
            raise ValidationError(f"precision.working_bits must be an integer >= {cls.MIN_BITS}")

        for key, value in config['checks'].items():
            if not isinstance(value, int) or value < 0:
                raise ValidationError(f"checks.{key} must be a non-negative integer")
        for key in ('coeff_bound', 'max_results', 'workers'):
            value = config['search'].get(key)
            if not isinstance(value, int) or value < (0 if key == 'coeff_bound' else 1):
                raise ValidationError(f"search.{key} has an invalid value: {value!r}")

        level = config['monitoring'].get('log_level')
        if not isinstance(level, str) or level.upper() not in cls.LOG_LEVELS:
            raise ValidationError(f"monitoring.log_level must be one of {', '.join(cls.LOG_LEVELS)}")
        return True
