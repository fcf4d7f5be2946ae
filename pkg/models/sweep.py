import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from models.param_point import ParamPoint
from models.scheme_config import Engine, GainMode, Scheme
from utils.errors import InvalidArgumentError

SWEEPABLE = ('l', 'G', 'T', 'r')
MAX_POINTS = 10 ** 6

# inclusive parameter domains
DOMAINS = {
    'l': (0.0, 1.0),
    'G': (1.0, math.inf),
    'T': (0.0, 1.0),
    'r': (0.0, math.inf),
}


def inclusive_range(start: float, stop: float, step: float) -> Tuple[float, ...]:
    """start, start + step, ... up to stop, with stop kept when it lands on the grid"""
    if not step > 0:
        raise InvalidArgumentError(f'Sweep step must be > 0, got {step}')
    if stop < start:
        raise InvalidArgumentError(f'Empty sweep range [{start}, {stop}]')
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count > MAX_POINTS:
        raise InvalidArgumentError(f'Sweep range has {count} points, limit is {MAX_POINTS}')
    values = start + step * np.arange(count)
    return tuple(float(round(v, 12)) for v in values)


@dataclass(frozen=True)
class SweepSpec:
    """One- or two-parameter sweep around a fixed parameter point"""

    parameters: Tuple[str, ...]
    values: Tuple[Tuple[float, ...], ...]
    base: ParamPoint
    schemes: Tuple[Scheme, ...] = (Scheme.CQI,)
    engine: Engine = Engine.CLOSED_FORM
    gain_mode: GainMode = GainMode.FREE
    output_format: str = 'csv'

    def __post_init__(self):
        if not 1 <= len(self.parameters) <= 2:
            raise InvalidArgumentError(f'A sweep takes one or two parameters, got {len(self.parameters)}')
        if len(set(self.parameters)) != len(self.parameters):
            raise InvalidArgumentError(f'Swept parameters must differ: {self.parameters}')
        if len(self.values) != len(self.parameters):
            raise InvalidArgumentError('One value list is needed per swept parameter')
        if not self.schemes:
            raise InvalidArgumentError('At least one scheme is needed')
        if self.output_format not in ('csv', 'json'):
            raise InvalidArgumentError(f'Unknown output format {self.output_format!r}')

        for name, values in zip(self.parameters, self.values):
            if name not in SWEEPABLE:
                raise InvalidArgumentError(f'Cannot sweep {name!r}; choose from {", ".join(SWEEPABLE)}')
            if not values:
                raise InvalidArgumentError(f'Empty value list for {name}')
            low, high = DOMAINS[name]
            bad = [v for v in values if not low <= v <= high]
            if bad:
                raise InvalidArgumentError(f'{name} values outside [{low}, {high}]: {bad[:5]}')

        if self.total_points > MAX_POINTS:
            raise InvalidArgumentError(f'Sweep has {self.total_points} points, limit is {MAX_POINTS}')

    @classmethod
    def from_range(cls, name, start, stop, step, base, **kwargs) -> 'SweepSpec':
        return cls(parameters=(name,), values=(inclusive_range(start, stop, step),), base=base, **kwargs)

    @property
    def total_points(self) -> int:
        return math.prod(len(v) for v in self.values) * len(self.schemes)

    def points(self) -> Iterator[Tuple[Dict[str, float], ParamPoint]]:
        """Grid points in row-major order of the swept parameters"""
        for combo in itertools.product(*self.values):
            swept = dict(zip(self.parameters, combo))
            yield swept, self.base.with_(**swept)

    def to_dict(self):
        return {
            'parameters': list(self.parameters),
            'values': [list(v) for v in self.values],
            'base': self.base.to_dict(),
            'schemes': [s.value for s in self.schemes],
            'engine': self.engine.label,
            'gain_mode': self.gain_mode.value,
            'output_format': self.output_format
        }


@dataclass
class CurveSeries:
    """Tabular curve data with units and the metadata needed to reproduce it"""

    figure_id: str
    columns: List[Tuple[str, str]]
    rows: List[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def column_names(self) -> List[str]:
        return [name for name, _ in self.columns]

    def add_row(self, row: Sequence) -> None:
        if len(row) != len(self.columns):
            raise InvalidArgumentError(
                f'Row has {len(row)} values, series {self.figure_id} has {len(self.columns)} columns'
            )
        self.rows.append(tuple(row))

    def column(self, name: str) -> list:
        idx = self.column_names.index(name)
        return [row[idx] for row in self.rows]

    def to_dict(self):
        return {
            'figure_id': self.figure_id,
            'columns': [{'name': n, 'unit': u} for n, u in self.columns],
            'rows': [dict(zip(self.column_names, row)) for row in self.rows],
            'metadata': dict(self.metadata)
        }
