import logging
import math
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize

from models.gain import GainSpec
from models.optimization import OptimizationOutcome
from models.param_point import ParamPoint
from models.scheme_config import GainMode
from models.verification import CheckResult
from utils import closed_form as cf
from utils.errors import BracketError, ConstraintInfeasibleError, InvalidArgumentError

logger = logging.getLogger(__name__)


class ScalarMinimum(NamedTuple):
    x: float
    fun: float
    evaluations: int


class _CountingObjective:
    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.f(x)


class DesignOptimizer:
    """Numerical search for the splitting ratio and gain minimizing the phase sensitivity"""

    def __init__(self):
        self.grid_points = 64
        self.t_margin = 1e-4
        self.golden_tolerance = 1e-7
        self.gain_max = 1e4
        self.asymptote_tolerance = 1e-6
        self.t_tolerance = 1e-4
        self.gap_tolerance = 1e-6

    def init_app(self, app):
        """Initialize with Flask app"""
        self.grid_points = app.config.get('GRID_POINTS', 64)
        self.t_margin = app.config.get('T_MARGIN', 1e-4)
        self.golden_tolerance = app.config.get('GOLDEN_TOLERANCE', 1e-7)
        self.gain_max = app.config.get('GAIN_MAX', 1e4)

    def golden_section(self, f: Callable[[float], float], bracket: Sequence[float], tol=None) -> ScalarMinimum:
        """
        Golden-section minimization of a scalar function

        Args:
            f: Objective
            bracket: (a, b) interval, scanned on the grid to locate the
                minimum, or an (a, m, b) triple with f(m) below both ends
            tol: Absolute tolerance on the minimizer

        A flat minimum found by the grid scan is resolved to its left edge
        by bisection instead of golden section.
        """
        tol = self.golden_tolerance if tol is None else tol
        objective = _CountingObjective(f)

        if len(bracket) == 2:
            a, b = sorted(float(v) for v in bracket)
            triple = self._grid_bracket(objective, np.linspace(a, b, self.grid_points))
            if isinstance(triple, ScalarMinimum):
                return triple
        elif len(bracket) == 3:
            triple = tuple(float(v) for v in bracket)
        else:
            raise BracketError(f'Bracket needs 2 or 3 points, got {len(bracket)}')

        xa, xb, xc = triple
        if not (xa < xb < xc):
            raise BracketError(f'Bracket points must be increasing, got {triple}')
        fa, fb, fc = objective(xa), objective(xb), objective(xc)
        if not (fb < fa and fb < fc):
            raise BracketError(
                'Bracket does not enclose a minimum',
                details={'bracket': list(triple), 'values': [fa, fb, fc]}
            )

        xtol = tol / (2.0 * max(abs(xb), tol))
        try:
            res = optimize.minimize_scalar(objective, bracket=triple, method='golden',
                                           options={'xtol': xtol})
        except ValueError as e:
            raise BracketError(str(e), details={'bracket': list(triple)}) from e
        return ScalarMinimum(x=float(res.x), fun=float(res.fun), evaluations=objective.calls)

    def _grid_bracket(self, objective, grid):
        values = np.array([objective(x) for x in grid])
        finite = np.isfinite(values)
        if not finite.any():
            raise BracketError('Objective is not finite anywhere on the scan grid')

        k = int(np.argmin(np.where(finite, values, np.inf)))
        fmin = values[k]
        left = values[k - 1] if k > 0 else np.inf
        right = values[k + 1] if k < len(grid) - 1 else np.inf

        if fmin < left and fmin < right:
            if k == 0 or k == len(grid) - 1:
                raise BracketError(
                    f'Minimum sits on the scan boundary x={grid[k]:.6g}',
                    details={'x': float(grid[k]), 'value': float(fmin)}
                )
            return grid[k - 1], grid[k], grid[k + 1]

        # flat minimum: argmin is the first grid point of the plateau
        if k == 0:
            return ScalarMinimum(x=float(grid[0]), fun=float(fmin), evaluations=objective.calls)
        lo, hi = grid[k - 1], grid[k]
        while hi - lo > self.golden_tolerance:
            mid = 0.5 * (lo + hi)
            if objective(mid) > fmin:
                lo = mid
            else:
                hi = mid
        return ScalarMinimum(x=float(hi), fun=float(objective(hi)), evaluations=objective.calls)

    def t_grid(self):
        """Scan grid over the clipped T domain, always containing the balanced point"""
        grid = np.linspace(self.t_margin, 1.0 - self.t_margin, self.grid_points)
        return np.unique(np.append(grid, 0.5))

    def minimize_over_t(self, objective: Callable[[float], float]) -> ScalarMinimum:
        """
        Grid scan over T followed by golden section on the best bracket

        Points where the objective raises a constraint error are skipped.
        """
        counted = _CountingObjective(objective)
        feasible = []
        for t in self.t_grid():
            try:
                feasible.append((float(t), counted(float(t))))
            except ConstraintInfeasibleError:
                continue
        if not feasible:
            raise ConstraintInfeasibleError('No feasible splitting ratio on the scan grid')

        xs = [x for x, _ in feasible]
        fs = [f for _, f in feasible]
        k = int(np.argmin(fs))
        if k == 0 or k == len(xs) - 1 or not (fs[k] < fs[k - 1] and fs[k] < fs[k + 1]):
            logger.debug('T scan minimum not interior (k=%d of %d); keeping grid value', k, len(xs))
            return ScalarMinimum(x=xs[k], fun=fs[k], evaluations=counted.calls)

        def guarded(t):
            try:
                return counted(t)
            except ConstraintInfeasibleError:
                return math.inf

        best = self.golden_section(guarded, (xs[k - 1], xs[k], xs[k + 1]))
        return ScalarMinimum(x=best.x, fun=best.fun, evaluations=counted.calls)

    def minimize_sensitivity(self, l, r, N, mode=GainMode.FREE, g_max=None) -> OptimizationOutcome:
        """
        Minimize the phase sensitivity over (T, G)

        Free mode uses the monotonicity of the sensitivity in G: unit gain up
        to the transition loss, the G -> infinity limit above it (g_max_gap in
        the metadata is how far G = g_max still trails that limit).
        Constrained mode ties G to T through the photon-number condition.
        """
        if not 0.0 <= l < 1.0:
            raise InvalidArgumentError(f'Loss rate must be in [0, 1), got {l}')
        if r < 0 or not N > 0:
            raise InvalidArgumentError(f'Need r >= 0 and N > 0, got r={r}, N={N}')
        g_max = self.gain_max if g_max is None else g_max
        if not g_max >= 1.0:
            raise InvalidArgumentError(f'Maximum gain must be >= 1, got {g_max}')
        mode = GainMode(mode)

        analytic_t = cf.t_opt(l, r)
        analytic_delta_phi = cf.sensitivity_opt(l, r, N)
        metadata = {'l': l, 'r': r, 'N': N, 'g_max': g_max}

        if mode == GainMode.CONSTRAINED:
            best = self.minimize_over_t(
                lambda t: cf.sensitivity(ParamPoint(N=N, r=r, T=t, G=cf.constrained_gain(t, l), l=l))
            )
            g_star = GainSpec.finite(cf.constrained_gain(best.x, l))
            metadata['analytic_reference'] = 'unconstrained optimum'
            outcome = OptimizationOutcome.create(
                best.x, g_star, best.fun, analytic_t, analytic_delta_phi,
                best.evaluations, mode=mode.value, metadata=metadata
            )
        elif mode == GainMode.FREE:
            if l > cf.TRANSITION_LOSS:
                # unbounded gain: the optimum is the G -> infinity limit, which does not depend on l
                best = self.minimize_over_t(
                    lambda t: cf.sensitivity_asymptotic(ParamPoint(N=N, r=r, T=t, l=l))
                )
                g_star, delta_phi = GainSpec.asymptotic(g_max), best.fun
                at_g_max = cf.sensitivity(ParamPoint(N=N, r=r, T=best.x, G=g_max, l=l))
                metadata['g_max_gap'] = (at_g_max - best.fun) / best.fun
                if metadata['g_max_gap'] > self.asymptote_tolerance:
                    logger.debug('Sensitivity at G=%g is still %.3e above the asymptote', g_max,
                                 metadata['g_max_gap'])
            else:
                best = self.minimize_over_t(lambda t: cf.sensitivity(ParamPoint(N=N, r=r, T=t, G=1.0, l=l)))
                g_star, delta_phi = GainSpec.finite(1.0), best.fun
                if l == cf.TRANSITION_LOSS:
                    metadata['note'] = 'sensitivity is gain independent at the transition loss'

            outcome = OptimizationOutcome.create(
                best.x, g_star, delta_phi, analytic_t, analytic_delta_phi,
                best.evaluations, mode=mode.value, metadata=metadata
            )
        else:
            raise InvalidArgumentError('Gain optimization supports the free and constrained modes only')

        logger.debug('Optimum at l=%g r=%g: %r', l, r, outcome)
        return outcome

    def validate_against_analytic(self, l, r, N=1.0) -> CheckResult:
        """Compare the numerical optimum with the closed-form one"""
        name = f'optimizer-vs-analytic(l={l:g}, r={r:g})'
        try:
            outcome = self.minimize_sensitivity(l, r, N)
        except Exception as e:
            return CheckResult.create(name, False, error_message=str(e), category='optimizer')

        passed = outcome.t_deviation < self.t_tolerance and abs(outcome.delta_phi_gap) < self.gap_tolerance
        details = outcome.to_dict()
        if l == cf.TRANSITION_LOSS:
            details['note'] = 'sensitivity is gain independent at the transition loss'
        message = None
        if not passed:
            message = (f'|dT|={outcome.t_deviation:.3e} (limit {self.t_tolerance:g}), '
                       f'gap={outcome.delta_phi_gap:.3e} (limit {self.gap_tolerance:g})')
        return CheckResult.create(name, passed, error_message=message, details=details, category='optimizer')

    def sweep_optimum(self, l_values, r, N, mode=GainMode.FREE, g_max=None):
        """Optimum for every loss value, in input order"""
        return [self.minimize_sensitivity(l, r, N, mode=mode, g_max=g_max) for l in l_values]


# Global design optimizer instance
design_optimizer = DesignOptimizer()
