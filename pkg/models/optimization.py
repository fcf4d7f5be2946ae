from dataclasses import dataclass, field

from models.gain import GainSpec


@dataclass(frozen=True)
class OptimizationOutcome:
    """Numerical optimum over (T, G) and its distance to the analytic optimum"""

    t_star: float
    g_star: GainSpec
    delta_phi_star: float
    analytic_t: float
    analytic_delta_phi: float
    t_deviation: float
    delta_phi_gap: float
    evaluations: int
    mode: str = 'free'
    metadata: dict = field(default_factory=dict)

    @classmethod
    def create(cls, t_star, g_star, delta_phi_star, analytic_t, analytic_delta_phi,
               evaluations, mode='free', metadata=None):
        """Build an outcome, filling in the deviations from the analytic values"""
        return cls(
            t_star=t_star,
            g_star=g_star,
            delta_phi_star=delta_phi_star,
            analytic_t=analytic_t,
            analytic_delta_phi=analytic_delta_phi,
            t_deviation=abs(t_star - analytic_t),
            delta_phi_gap=(delta_phi_star - analytic_delta_phi) / analytic_delta_phi,
            evaluations=evaluations,
            mode=mode,
            metadata=metadata or {}
        )

    def to_dict(self):
        return {
            't_star': self.t_star,
            'g_star': self.g_star.to_dict(),
            'delta_phi_star': self.delta_phi_star,
            'analytic_t': self.analytic_t,
            'analytic_delta_phi': self.analytic_delta_phi,
            't_deviation': self.t_deviation,
            'delta_phi_gap': self.delta_phi_gap,
            'evaluations': self.evaluations,
            'mode': self.mode,
            'metadata': dict(self.metadata)
        }

    def __repr__(self):
        return f'<OptimizationOutcome T={self.t_star:.6f} G={self.g_star} delta_phi={self.delta_phi_star:.6g}>'
