from dataclasses import dataclass, field
from typing import Dict


@dataclass(frozen=True)
class Metrics:
    """Figures of merit of one evaluated configuration"""

    signal_slope: float
    noise_std: float
    delta_phi: float
    M_db: float
    rel_snr_db: float
    beyond_sql_db: float
    degradation_db: float
    breakdown: Dict[str, float] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def noise_variance(self) -> float:
        return self.noise_std ** 2

    def breakdown_total(self) -> float:
        return sum(self.breakdown.values())

    def to_dict(self):
        """Flat metrics with nested breakdown and metadata"""
        return {
            'signal_slope': self.signal_slope,
            'noise_std': self.noise_std,
            'delta_phi': self.delta_phi,
            'M_db': self.M_db,
            'rel_snr_db': self.rel_snr_db,
            'beyond_sql_db': self.beyond_sql_db,
            'degradation_db': self.degradation_db,
            'breakdown': dict(self.breakdown),
            'metadata': dict(self.metadata)
        }

    def __repr__(self):
        return f'<Metrics delta_phi={self.delta_phi:.6g} M={self.M_db:.3f} dB>'
