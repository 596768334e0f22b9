from .config import ScenarioConfig, normalize, parse_config, parse_corpus
from .runner import RunReport, SweepReport, execute, run, sweep
