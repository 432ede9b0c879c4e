"""Link-level simulator for IRS-assisted ambient backscatter readers.

A multi-antenna reader detects a passive tag's on-off reflections riding on
an ambient source, helped by a reconfigurable reflecting surface. The
package simulates the physical link, learns the surface configuration and
combiner without channel knowledge through per-episode deep reinforcement
learning, and compares against full-CSI baselines.
"""
from .agent import (DdpgSettings, EpisodeResult, TrainingSchedule, encode_action,
                    encode_state, run_episode)
from .benchmarks import (BENCHMARK_METHODS, BenchmarkResult, evaluate_benchmarks,
                         full_csi_eigen_combiner, optimize_irs_full_csi, zf_combiner)
from .channel import (ChannelRealization, NodeGeometry, generate_realization,
                      path_loss)
from .config import (ExperimentConfig, default_config, full_scale, load_config,
                     system_parameters)
from .detection import (eigen_combiner, estimate_covariance, ideal_covariances,
                        refine_covariance, sample_grcd)
from .errors import (DefinitenessError, DegenerateGeometryError, GeometryError,
                     InvalidInputError, NumericalError, SchemaError, ShapeError,
                     SimulatorError, StateError, StatisticsError)
from .harness import ExperimentRun, run_experiment, sweep_lt, sweep_t1
from .plots import emit_plots
from .signal_model import (CompositeChannels, SystemParameters, ber_from_grcd,
                           composite_channels, energy_statistics, grcd, true_grcd)

__version__ = "0.1.0"
