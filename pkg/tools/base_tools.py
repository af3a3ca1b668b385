from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

from pydantic import BaseModel


class ProbeInput(BaseModel):
    """Input of one walk executed by a probe tool"""
    steps: int
    seed: int
    index: int = 0
    checkpoints: Optional[List[int]] = None


class BaseTool(ABC):
    """Base class for all tools"""

    name: str
    description: str

    @abstractmethod
    def execute(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """Execute the tool"""
        pass

    def get_schema(self) -> Dict[str, Any]:
        """Return the tool schema"""
        return {
            "name": self.name,
            "description": self.description,
            "parameters": self.get_parameters()
        }

    @abstractmethod
    def get_parameters(self) -> Dict[str, Any]:
        """Return parameter schema"""
        pass


class WalkProbeTool(BaseTool):
    """A tool that runs one walk and reports (n, norm, width, direction, ratio) at checkpoints"""

    def get_parameters(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "steps": {"type": "integer", "description": "Walk length"},
                "seed": {"type": "integer", "description": "Experiment seed"},
                "index": {"type": "integer", "description": "Substream index of this walk"},
                "checkpoints": {
                    "type": "array",
                    "items": {"type": "integer"},
                    "description": "Step counts to report at (default: final step only)"
                }
            },
            "required": ["steps", "seed"]
        }

    @abstractmethod
    def probe(self, request: ProbeInput) -> List[Dict[str, Any]]:
        """Run the walk and return one point per checkpoint"""
        pass

    def execute(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        try:
            request = ProbeInput(**input_data)
            if request.checkpoints is None:
                request.checkpoints = [request.steps]
            points = self.probe(request)
            return {
                "success": True,
                "data": {"points": points},
                "tool_name": self.name
            }
        except Exception as e:
            return {
                "success": False,
                "error": str(e),
                "tool_name": self.name
            }


def run_tool(tool: BaseTool, input_data: Dict[str, Any]) -> Dict[str, Any]:
    """Module-level entry so tools can run in worker processes"""
    return tool.execute(input_data)
