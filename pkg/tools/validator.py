from typing import Any, Dict

from loguru import logger

from .base_tools import BaseTool
from services.geometry_service import ORIGIN, contains, farthest_from_line
from services.investor_service import InvestorService, InvestorState
from services.oracle_service import (
    hull_of,
    naive_chord_width,
    naive_rates,
    naive_width_path,
    same_vertex_set,
    segment_hits_interior,
    unit_steps,
)
from services.rancher_service import RancherService, RancherState
from services.rng_service import derive

TOLERANCE = 1e-9


class OracleValidatorTool(BaseTool):

    name = "validate_walk"
    description = (
        "Replay a short walk and compare every fast structure (incremental hull, arc legality, "
        "hull-based rates and widths) against the slow reference implementations."
    )

    def get_parameters(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "model": {"type": "string", "enum": ["rancher", "investor"]},
                "steps": {"type": "integer", "description": "Walk length (keep it short)"},
                "seed": {"type": "integer"},
                "index": {"type": "integer", "default": 0},
                "alpha": {"type": "number", "description": "Investor influence parameter", "default": 1.0},
                "stride": {"type": "integer", "description": "Full-hull comparisons every stride steps", "default": 1}
            },
            "required": ["model", "steps", "seed"]
        }

    def execute(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """Run the replay and count disagreements"""
        try:
            model = input_data.get("model", "rancher")
            steps = int(input_data["steps"])
            seed = int(input_data["seed"])
            index = int(input_data.get("index", 0))
            stride = max(1, int(input_data.get("stride", 1)))

            logger.info(f"Validating {model} walk against oracles: steps={steps} seed={seed} index={index}")

            if model == "rancher":
                mismatches = self._validate_rancher(steps, seed, index, stride)
            elif model == "investor":
                mismatches = self._validate_investor(steps, float(input_data.get("alpha", 1.0)), seed, index)
            else:
                return {
                    "success": False,
                    "error": f"Unknown model: {model}",
                    "tool_name": self.name
                }

            total = sum(mismatches.values())
            logger.info(f"Validation result: {total} mismatch(es) {mismatches}")

            return {
                "success": True,
                "data": {
                    "model": model,
                    "steps_checked": steps,
                    "mismatches": mismatches,
                    "passed": total == 0
                },
                "tool_name": self.name
            }

        except Exception as e:
            logger.error(f"Error validating walk: {e}")
            return {
                "success": False,
                "error": str(e),
                "tool_name": self.name
            }

    def _validate_rancher(self, steps: int, seed: int, index: int, stride: int) -> Dict[str, int]:
        service = RancherService(keep_path=True)
        stream = derive(seed, index)
        state = RancherState.start(keep_path=True)
        mismatches = {"illegal_step": 0, "hull": 0, "containment": 0, "monotone": 0, "width": 0, "unit_step": 0}

        for _ in range(steps):
            before = state.hull.copy()
            here = state.position
            service.step(state, stream)
            there = state.position

            if segment_hits_interior(before, here, there):
                mismatches["illegal_step"] += 1
            if not all(contains(state.hull, v) for v in before.vertices()):
                mismatches["monotone"] += 1

            if state.n % stride == 0 or state.n == steps:
                if not same_vertex_set(state.hull, hull_of(state.path)):
                    mismatches["hull"] += 1
                if not all(contains(state.hull, p) for p in state.path):
                    mismatches["containment"] += 1
                if there != ORIGIN:
                    fast = farthest_from_line(state.hull, ORIGIN, there)
                    slow = naive_width_path(state.path, ORIGIN, there)
                    if abs(fast - slow) > TOLERANCE:
                        mismatches["width"] += 1

        if unit_steps(state.path) > 1e-12:
            mismatches["unit_step"] += 1
        return mismatches

    def _validate_investor(self, steps: int, alpha: float, seed: int, index: int) -> Dict[str, int]:
        service = InvestorService(keep_path=True)
        stream = derive(seed, index)
        state = InvestorState.start(alpha, keep_path=True)
        mismatches = {"rates": 0, "width": 0, "ordering": 0}

        for _ in range(steps):
            service.step(state, stream)
            if state.blown_up:
                break

            rmax, rmin = service.extremal_rates(state)
            slow_max, slow_min = naive_rates(state.path)
            if abs(rmax - slow_max) > TOLERANCE * max(1.0, abs(slow_max)) or \
                    abs(rmin - slow_min) > TOLERANCE * max(1.0, abs(slow_min)):
                mismatches["rates"] += 1
            if rmin > rmax:
                mismatches["ordering"] += 1
            if abs(service.width(state) - naive_chord_width(state.path)) > TOLERANCE * max(1.0, abs(state.x)):
                mismatches["width"] += 1

        return mismatches
