from typing import Any, Dict, List

from .base_tools import ProbeInput, WalkProbeTool


class PowerLawStubTool(WalkProbeTool):
    """Deterministic stand-in whose width is exactly n ** exponent"""

    name = "power_law_stub"
    description = "Synthetic model with width n^exponent and unit speed; checks the estimation pipeline."

    def __init__(self, exponent: float = 0.6):
        self.exponent = exponent

    def probe(self, request: ProbeInput) -> List[Dict[str, Any]]:
        return [
            {
                "n": n,
                "norm": float(n),
                "width": float(n) ** self.exponent if n else 0.0,
                "direction": 0.0 if n else None,
                "ratio": 1.0 if n else None
            }
            for n in request.checkpoints
        ]


class StraightLineStubTool(WalkProbeTool):
    """Unit steps along a fixed ray"""

    name = "straight_line_stub"
    description = "Walk that always steps in the same direction; speed exactly 1, width 0."

    def __init__(self, heading: float = 0.0):
        self.heading = heading

    def probe(self, request: ProbeInput) -> List[Dict[str, Any]]:
        return [
            {
                "n": n,
                "norm": float(n),
                "width": 0.0,
                "direction": self.heading if n else None,
                "ratio": 1.0 if n else None
            }
            for n in request.checkpoints
        ]
