"""STL monitoring and control synthesis with averaged robustness scores."""

from .formula import (And, Direction, Eventually, FalseFormula, Formula,
                      Globally, Not, Or, ParseError, Predicate, TrueFormula,
                      Until, FALSE, TRUE, format_formula, horizon, parse)
from .signal import (NormalizationMap, Trace, TraceError, denormalize,
                     load_trace, normalize, save_trace)
from .logic_algebra import (conj, conj_many, disj, disj_many, implies, neg,
                            negative_part, positive_part)
from .robustness import (EvaluationError, SmoothConfig, Status,
                         UnsupportedOperatorError, Verdict, agm, satisfies,
                         smooth, traditional)
from .dynamics import (MODEL_BUILDERS, OutputChannel, SimulationError,
                       SystemModel, curvature_unicycle, double_integrator,
                       planar_integrator, simulate, to_trace, unicycle)
from .synthesis import (OptimizerConfig, SynthesisProblem, SynthesisResult,
                        fd_gradient, gradient_ascent, objective,
                        quadratic_cost)
from .disturbance import (DisturbanceConfig, DisturbanceResult, RunVerdict,
                          default_sigmas, failure_rate, perturb_policy)
from .config import (ConfigError, ProblemSetup, load_config, parse_config,
                     region_atoms, resolve_config_path)

__version__ = "0.1.0"
