"""Result record shared by the LP and QP solvers."""

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class SolveReport:
    """Outcome of one solve.

    ``objective`` is the value of the problem that was solved: the relaxed
    objective ``fit/2 + rho * locality`` for the interior-point solver and the
    locality for the exact LP. ``fit`` is always ``||Xw - y||^2``.
    """

    w: np.ndarray
    objective: float
    fit: float
    locality: float
    rho: Optional[float]
    iters: int
    status: str
    residuals: dict = field(default_factory=dict)
    kkt_fallbacks: int = 0
    dual_eq: Optional[float] = field(default=None, repr=False)
    dual_ineq: Optional[np.ndarray] = field(default=None, repr=False)
    objective_scale: float = field(default=1.0, repr=False)
    iter_seconds: Optional[float] = field(default=None, repr=False)

    @property
    def ok(self):
        return self.status == "optimal"

    def to_dict(self):
        return {
            "w": [float(v) for v in self.w],
            "objective": float(self.objective),
            "fit": float(self.fit),
            "locality": float(self.locality),
            "rho": None if self.rho is None else float(self.rho),
            "iters": int(self.iters),
            "status": self.status,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "kkt_fallbacks": int(self.kkt_fallbacks),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)
