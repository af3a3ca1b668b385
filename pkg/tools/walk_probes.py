from typing import Any, Dict, List

from loguru import logger

from .base_tools import ProbeInput, WalkProbeTool
from services.investor_service import InvestorService
from services.rancher_service import RancherService


class RancherProbeTool(WalkProbeTool):

    name = "rancher"
    description = (
        "Planar walk conditioned to avoid the interior of its past convex hull. "
        "Reports the distance of the farthest path point from the line through the origin "
        "and the walker."
    )

    def probe(self, request: ProbeInput) -> List[Dict[str, Any]]:
        logger.debug(f"Rancher probe: steps={request.steps} seed={request.seed} index={request.index}")
        records = RancherService().run(
            steps=request.steps,
            seed=request.seed,
            checkpoints=request.checkpoints,
            index=request.index
        )
        return [
            {
                "n": record.n,
                "norm": record.norm,
                "width": record.width,
                "direction": record.direction,
                "ratio": record.norm / record.n if record.n else None
            }
            for record in records
        ]


class InvestorProbeTool(WalkProbeTool):

    name = "investor"
    description = (
        "Extremal investor: Gaussian log-price walk whose drift is alpha times the mean of the "
        "best and worst past performance rates. Reports the largest deviation from the chord."
    )

    def __init__(self, alpha: float = 1.0):
        self.alpha = alpha

    def get_parameters(self) -> Dict[str, Any]:
        schema = super().get_parameters()
        schema["properties"]["alpha"] = {"type": "number", "description": "Influence parameter", "default": self.alpha}
        return schema

    def probe(self, request: ProbeInput) -> List[Dict[str, Any]]:
        logger.debug(f"Investor probe: alpha={self.alpha} steps={request.steps} seed={request.seed} index={request.index}")
        records = InvestorService().run(
            steps=request.steps,
            alpha=self.alpha,
            seed=request.seed,
            checkpoints=request.checkpoints,
            index=request.index
        )
        points = []
        for record in records:
            if record.status != "ok":
                # the width of a blown-up walk is meaningless
                points.append({"n": record.n, "norm": record.norm, "width": None, "direction": None, "ratio": None})
                continue
            points.append({
                "n": record.n,
                "norm": record.norm,
                "width": record.width,
                "direction": None,
                "ratio": record.extras.get("ratio")
            })
        return points
