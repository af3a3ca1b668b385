from tools.stub_probes import PowerLawStubTool, StraightLineStubTool
from tools.validator import OracleValidatorTool
from tools.walk_probes import InvestorProbeTool, RancherProbeTool

__all__ = [
    'RancherProbeTool',
    'InvestorProbeTool',
    'PowerLawStubTool',
    'StraightLineStubTool',
    'OracleValidatorTool'
]
