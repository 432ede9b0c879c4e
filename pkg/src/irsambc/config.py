"""Experiment configuration: defaults, YAML loading, and dotted overrides.

Powers live in dBm here and are converted to linear milliwatts at the point
where physics objects are built. The defaults reproduce the desk-scale
experiment; full_scale() switches to the long published-style run.
"""
import copy
from dataclasses import asdict, dataclass, field, fields

import yaml

from .agent import DdpgSettings, TrainingSchedule
from .channel import NodeGeometry
from .errors import SchemaError
from .signal_model import SystemParameters

DRL_METHOD = "drl"


def dbm_to_mw(dbm):
    return 10.0 ** (dbm / 10.0)


@dataclass
class GeometryConfig:
    source: list = field(default_factory=lambda: [-5.0, 0.0])
    tag: list = field(default_factory=lambda: [0.0, 0.0])
    irs: list = field(default_factory=lambda: [0.0, 5.0])
    reader: list = field(default_factory=lambda: [5.0, 0.0])
    carrier_hz: float = 2.4e9
    path_loss_exponent: float = 2.5
    reference_gain: float = None
    reflector_aperture: bool = True


@dataclass
class SystemConfig:
    m: int = 4
    n_values: list = field(default_factory=lambda: [16, 64])
    p_s_dbm: float = 20.0
    p_w_dbm: float = -95.0
    rician_k: float = 3.0
    alpha: float = 1.0
    l_t: int = 150
    l_d: int = 20


@dataclass
class AgentConfig:
    t_random: int = 1000
    t_actor: int = 500
    batch_size: int = 16
    gamma: float = 0.0
    update_period: int = 1
    actor_rate: float = 0.002
    critic_rate: float = 0.002
    tau: float = 0.0005
    ou_theta: float = 0.15
    ou_sigma: float = 0.05
    ou_dt: float = 1.0
    rms_momentum: float = 0.8
    rms_smoothing: float = 0.99
    rms_eps: float = 1e-8
    nesterov: bool = False
    reward_scale: float = 100.0
    reward_combiner: str = "refreshed"
    final_selection: str = "best"
    refinement_noise: str = "estimated"


@dataclass
class BenchmarkConfig:
    restarts: int = 4
    iterations: int = 50


@dataclass
class RunConfig:
    realizations: int = 50
    master_seed: int = 123456789
    methods: list = field(default_factory=lambda: [
        "drl", "zf", "eig", "zf-irs", "eig-irs"])
    out_dir: str = "results"
    workers: int = 1
    save_traces: bool = False


@dataclass
class ExperimentConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    system: SystemConfig = field(default_factory=SystemConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    benchmarks: BenchmarkConfig = field(default_factory=BenchmarkConfig)
    run: RunConfig = field(default_factory=RunConfig)


def default_config():
    return ExperimentConfig()


def full_scale(config):
    """Published-style run: 1000 realizations over a denser reflector grid."""
    out = copy.deepcopy(config)
    out.run.realizations = 1000
    out.system.n_values = [16, 36, 64, 100]
    return out


_SECTIONS = {f.name: f.default_factory for f in fields(ExperimentConfig)}


def _apply_section(obj, name, data):
    if not isinstance(data, dict):
        raise SchemaError(f"config section '{name}' must be a mapping")
    known = {f.name for f in fields(obj)}
    for key, value in data.items():
        if key not in known:
            raise SchemaError(f"unknown config key '{name}.{key}'")
        setattr(obj, key, value)


def config_from_dict(data):
    if not isinstance(data, dict):
        raise SchemaError("config root must be a mapping")
    config = default_config()
    for name, section in data.items():
        if name not in _SECTIONS:
            raise SchemaError(f"unknown config section '{name}'")
        _apply_section(getattr(config, name), name, section)
    return config


def load_config(path):
    """Parse a YAML config file; unknown sections or keys are errors."""
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    return config_from_dict(data)


def config_to_dict(config):
    return asdict(config)


def save_config(config, path):
    with open(path, "w") as fh:
        yaml.safe_dump(config_to_dict(config), fh, sort_keys=False)


def apply_overrides(config, overrides):
    """Apply 'section.key=value' strings; values parse as YAML scalars."""
    for item in overrides:
        if "=" not in item:
            raise SchemaError(f"override '{item}' is not of the form section.key=value")
        dotted, raw = item.split("=", 1)
        parts = dotted.strip().split(".")
        if len(parts) != 2:
            raise SchemaError(f"override target '{dotted}' is not section.key")
        section, key = parts
        if section not in _SECTIONS:
            raise SchemaError(f"unknown config section '{section}'")
        target = getattr(config, section)
        if key not in {f.name for f in fields(target)}:
            raise SchemaError(f"unknown config key '{section}.{key}'")
        setattr(target, key, yaml.safe_load(raw))
    return config


def node_geometry(config):
    g = config.geometry
    return NodeGeometry(
        source=tuple(g.source), tag=tuple(g.tag), irs=tuple(g.irs),
        reader=tuple(g.reader), carrier_hz=g.carrier_hz,
        path_loss_exponent=g.path_loss_exponent,
        reference_gain=g.reference_gain,
        reflector_aperture=g.reflector_aperture)


def system_parameters(config, l_t=None):
    s = config.system
    return SystemParameters(
        p_s=dbm_to_mw(s.p_s_dbm), p_w=dbm_to_mw(s.p_w_dbm), alpha=s.alpha,
        l_t=s.l_t if l_t is None else l_t, l_d=s.l_d)


def training_schedule(config, t_random=None):
    a = config.agent
    return TrainingSchedule(
        t_random=a.t_random if t_random is None else t_random,
        t_actor=a.t_actor, batch_size=a.batch_size, gamma=a.gamma,
        update_period=a.update_period)


def ddpg_settings(config):
    a = config.agent
    return DdpgSettings(
        actor_rate=a.actor_rate, critic_rate=a.critic_rate, tau=a.tau,
        ou_theta=a.ou_theta, ou_sigma=a.ou_sigma, ou_dt=a.ou_dt,
        rms_momentum=a.rms_momentum, rms_smoothing=a.rms_smoothing,
        rms_eps=a.rms_eps, nesterov=a.nesterov, reward_scale=a.reward_scale,
        reward_combiner=a.reward_combiner, final_selection=a.final_selection,
        refinement_noise=a.refinement_noise)
