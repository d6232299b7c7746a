"""Reproducible numerical scenarios behind the command-line tool.

Each scenario takes a flat configuration dictionary and returns a
:class:`Report`: a table (column names plus rows) and a dictionary of
summary values. Configuration values may be given as strings with unit
suffixes (``62ns``, ``1.2us``, ``32.1kHz``, ``2pi*1.25MHz``) or grids
``start:stop:count`` (inclusive, e.g. ``0:pi:25``).
"""

from __future__ import annotations

import ast
import hashlib
import json
import math
import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import dynamics as dyn
from . import nonclassical as nc
from . import partition as part
from . import states as st
from . import tomography as tomo
from .angular import Direction, SpinState, as_spin

TOOL_VERSION = "0.1.0"


class ConfigError(ValueError):
    """Invalid scenario name, configuration key or value."""


# ---------------------------------------------------------------- parsing

_UNITS = {
    "": 1.0,
    "hz": 1.0,
    "khz": 1e3,
    "mhz": 1e6,
    "ghz": 1e9,
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "µs": 1e-6,
    "ns": 1e-9,
}

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}


def _eval_arith(node):
    if isinstance(node, ast.Expression):
        return _eval_arith(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_arith(node.left), _eval_arith(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _eval_arith(node.operand)
        return -value if isinstance(node.op, ast.USub) else value
    raise ConfigError("unsupported expression")


def parse_quantity(text) -> float:
    """Number with an optional unit suffix, e.g. ``2pi*32.1kHz`` or ``pi/2``."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    raw = str(text).strip()
    m = re.fullmatch(r"(.*?)\s*([a-zA-Zµ]*)", raw)
    expr, unit = m.group(1), m.group(2)
    if unit.lower() == "pi" or unit.lower().endswith("pi"):
        expr, unit = raw, ""
    if unit.lower() not in _UNITS:
        raise ConfigError(f"unknown unit {unit!r} in {raw!r}")
    expr = re.sub(r"(\d)\s*pi", r"\1*pi", expr)
    if expr.endswith("*"):
        expr = expr[:-1]
    try:
        value = _eval_arith(ast.parse(expr or "1", mode="eval"))
    except (SyntaxError, ConfigError, ZeroDivisionError):
        raise ConfigError(f"cannot parse quantity {raw!r}") from None
    return value * _UNITS[unit.lower()]


def parse_grid(text) -> np.ndarray:
    """``start:stop:count`` (inclusive) or a comma-separated list of quantities."""
    if isinstance(text, (list, tuple)):
        return np.array([parse_quantity(x) for x in text])
    raw = str(text).strip()
    if ":" in raw:
        pieces = raw.split(":")
        if len(pieces) != 3:
            raise ConfigError(f"grid {raw!r} must be start:stop:count")
        try:
            count = int(pieces[2])
        except ValueError:
            raise ConfigError(f"grid count in {raw!r} must be an integer") from None
        if count < 1:
            raise ConfigError(f"grid {raw!r} needs a positive count")
        return np.linspace(parse_quantity(pieces[0]), parse_quantity(pieces[1]), count)
    return np.array([parse_quantity(x) for x in raw.split(",") if x.strip()])


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


def parse_spin(text) -> float:
    """``8``, ``3/2`` or ``1.5``; must be a non-negative multiple of 1/2."""
    try:
        value = Fraction(str(text).strip())
    except ValueError:
        raise ConfigError(f"cannot parse spin {text!r}") from None
    if value < 0 or (2 * value).denominator != 1:
        raise ConfigError(f"spin must be a non-negative multiple of 1/2, got {text!r}")
    return float(value)


_PARSERS = {
    "spin": parse_spin,
    "float": parse_quantity,
    "int": lambda x: int(parse_quantity(x)),
    "str": lambda x: str(x),
    "grid": lambda x: str(x) if not isinstance(x, (list, tuple)) else ",".join(map(str, x)),
    "bool": parse_bool,
}


# ---------------------------------------------------------------- schema

_STATE_KEYS = {
    "j": ("spin", 8),
    "state": ("str", "cat"),
    "m": ("float", None),
    "state_theta": ("float", math.pi),
    "state_phi": ("float", 0.0),
    "alpha": ("float", 0.0),
    "amplitudes": ("str", ""),
    "chi": ("float", 2 * math.pi * 1.25e6),
    "larmor": ("float", 0.0),
    "duration": ("float", None),
}

_STATE_HELP = (
    "state: dicke (uses m), w, coherent (state_theta/state_phi), cat (alpha), "
    "oat (|m=-J> twisted by chi, larmor for duration; default duration gives the cat), "
    "amplitudes (comma list of complex Dicke amplitudes, m = -J ... J)"
)


def build_state(cfg: dict) -> SpinState:
    """The spin state described by the ``state`` family of keys."""
    j = as_spin(cfg["j"])
    name = cfg["state"]
    if name == "dicke":
        m = -j.j if cfg.get("m") is None else cfg["m"]
        return st.dicke(j, m)
    if name == "w":
        return st.w_state(j)
    if name == "coherent":
        return st.coherent(j, Direction(cfg["state_theta"], cfg["state_phi"]))
    if name == "cat":
        return st.cat_state(j, cfg["alpha"])
    if name == "oat":
        chi = cfg["chi"]
        duration = cfg.get("duration")
        p = st.OatParams.cat_revival(chi, cfg["larmor"]) if duration is None else st.OatParams(chi, cfg["larmor"], duration)
        return st.one_axis_twisting(st.dicke(j, -j.j), p)
    if name == "amplitudes":
        try:
            amps = [complex(x.strip().replace(" ", "")) for x in cfg["amplitudes"].split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"cannot parse amplitudes {cfg['amplitudes']!r}") from None
        return st.superposition(j, amps)
    raise ConfigError(f"unknown state {name!r}; choose dicke, w, coherent, cat, oat or amplitudes")


@dataclass
class Report:
    anchor: str
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)
    plot: tuple | None = None  # (x column, [y columns])


@dataclass(frozen=True)
class Scenario:
    name: str
    anchor: str
    description: str
    keys: dict
    columns: tuple
    run: object

    def help_text(self) -> str:
        lines = [self.description, "", "configuration keys (defaults):"]
        for key, (kind, default) in self.keys.items():
            lines.append(f"  {key.replace('_', '-')}: {kind} = {default}")
        lines += ["", "CSV columns: " + ", ".join(self.columns)]
        return "\n".join(lines)


SCENARIOS: dict = {}


def scenario(name, anchor, description, keys, columns):
    def register(fn):
        SCENARIOS[name] = Scenario(name, anchor, description, keys, tuple(columns), fn)
        return fn

    return register


def resolve_config(name: str, overrides: dict) -> dict:
    """Defaults of scenario ``name`` updated with parsed ``overrides``."""
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose one of {', '.join(SCENARIOS)}")
    keys = SCENARIOS[name].keys
    cfg = {key: default for key, (kind, default) in keys.items()}
    for raw_key, value in overrides.items():
        key = raw_key.replace("-", "_")
        if key not in keys:
            raise ConfigError(f"scenario {name!r} has no configuration key {raw_key!r}")
        if value is None:
            cfg[key] = None
            continue
        try:
            cfg[key] = _PARSERS[keys[key][0]](value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {raw_key!r}: {exc}") from None
    return cfg


def config_hash(name: str, cfg: dict) -> str:
    """sha256 of the canonical JSON of ``{"scenario": name, "config": cfg}``."""
    return hashlib.sha256(canonical_json({"scenario": name, "config": cfg}).encode()).hexdigest()


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def run_scenario(name: str, overrides: dict | None = None, seed: int = 0) -> tuple:
    """Resolve the configuration and run; returns ``(Report, config)``."""
    cfg = resolve_config(name, overrides or {})
    report = SCENARIOS[name].run(cfg, seed)
    return report, cfg


# ---------------------------------------------------------------- scenarios


@scenario(
    "qm-table",
    "pair-up-probability-per-dicke-level",
    "Probability Q_m that a random qubit pair of |J, m> is |up,up>.",
    {"j": ("spin", 8)},
    ["m", "q_m", "q_m_exact"],
)
def _qm_table(cfg, seed):
    j = as_spin(cfg["j"])
    rows, total = [], Fraction(0)
    for m in j.ms:
        q = part.q_dicke(j, m, exact=True)
        total += q
        rows.append([float(m), float(q), str(q)])
    return Report(
        "pair-up-probability-per-dicke-level",
        ["m", "q_m", "q_m_exact"],
        rows,
        {"sum_q_m": float(total), "sum_q_m_exact": str(total)},
        ("m", ["q_m"]),
    )


@scenario(
    "husimi",
    "pair-husimi-function",
    "Pair Husimi function on a (theta, phi) grid. shots > 0 adds a column "
    "estimated from seeded Stern-Gerlach samples of the full spin.\n" + _STATE_HELP,
    {**_STATE_KEYS, "state": ("str", "w"), "theta_grid": ("grid", "0:pi:25"), "phi_grid": ("grid", "0"), "shots": ("int", 0)},
    ["theta_rad", "phi_rad", "q_pair", "q_pair_sampled (with shots)"],
)
def _husimi(cfg, seed):
    state = build_state(cfg)
    pair = part.reduced_pair_state(state)
    q_m = np.array([part.q_dicke(state.j, m) for m in state.j.ms])
    rows = []
    columns = ["theta_rad", "phi_rad", "q_pair"]
    if cfg["shots"] > 0:
        columns.append("q_pair_sampled")
    node = 0
    for theta in parse_grid(cfg["theta_grid"]):
        for phi in parse_grid(cfg["phi_grid"]):
            row = [float(theta), float(phi), float(part.pair_husimi_grid(pair, theta, phi))]
            if cfg["shots"] > 0:
                counts = part.sample_projections(state, Direction(theta, phi), cfg["shots"], seed + node)
                row.append(float(q_m @ counts / cfg["shots"]))
            rows.append(row)
            node += 1
    return Report("pair-husimi-function", columns, rows, {}, ("theta_rad", columns[2:]))


@scenario(
    "cdist",
    "nonclassicality-distribution",
    "Direction-resolved non-classicality C_n = 1 - (sqrt(Q(-n)) + sqrt(Q(n)))^2 on a grid, "
    "with its maximum over the sphere and the two-qubit concurrence.\n" + _STATE_HELP,
    {**_STATE_KEYS, "state": ("str", "w"), "theta_grid": ("grid", "0:pi:37"), "phi_grid": ("grid", "0")},
    ["theta_rad", "phi_rad", "q_plus", "q_minus", "c_n"],
)
def _cdist(cfg, seed):
    state = build_state(cfg)
    pair = part.reduced_pair_state(state)
    rows = []
    for theta in parse_grid(cfg["theta_grid"]):
        for phi in parse_grid(cfg["phi_grid"]):
            n = Direction(theta, phi)
            a = n.antipode()
            qp = float(part.pair_husimi_grid(pair, n.theta, n.phi))
            qm = float(part.pair_husimi_grid(pair, a.theta, a.phi))
            rows.append([float(theta), float(phi), qp, qm, float(nc.c_distribution(pair, n))])
    bound, best = nc.concurrence_lower_bound(pair)
    summary = {
        "max_c_n": nc.max_c_distribution(pair)[0],
        "argmax_theta_rad": best.theta,
        "argmax_phi_rad": best.phi,
        "concurrence_lower_bound": bound,
        "wootters_concurrence": nc.wootters_concurrence(pair),
    }
    return Report("nonclassicality-distribution", ["theta_rad", "phi_rad", "q_plus", "q_minus", "c_n"], rows, summary, ("theta_rad", ["c_n"]))


@scenario(
    "squeeze-scan",
    "one-axis-twisting-squeezing",
    "Minimal equatorial spin uncertainty along a one-axis-twisting trajectory "
    "and the pair concurrence it implies, compared with the exact pair concurrence. "
    "The default initial state is |m=-J> (coherent state at the south pole).\n" + _STATE_HELP,
    {
        **_STATE_KEYS,
        "state": ("str", "dicke"),
        "chi": ("float", 2 * math.pi * 32.1e3),
        "t_grid": ("grid", "0:1.4us:141"),
    },
    ["t_s", "delta_j_min", "phi_min_rad", "concurrence_from_squeezing", "wootters_concurrence"],
)
def _squeeze_scan(cfg, seed):
    state = build_state(cfg)
    times = parse_grid(cfg["t_grid"])
    chi, larmor = cfg["chi"], cfg["larmor"]
    prop = nc._oat_propagator(state.j, chi, larmor)
    rows = []
    for t in times:
        u = prop(t)
        s = SpinState(state.j, u @ state.matrix @ u.conj().T)
        dj, phi = nc.min_equatorial_uncertainty(s)
        rows.append([float(t), dj, phi, nc.concurrence_from_squeezing(dj, state.j), nc.wootters_concurrence(part.reduced_pair_state(s))])
    best = nc.oat_squeezing_optimum(state, chi, float(times.max()), larmor)
    summary = {
        "optimum_t_s": best.time,
        "optimum_delta_j_min": best.delta_j_min,
        "optimum_concurrence_from_squeezing": nc.concurrence_from_squeezing(best.delta_j_min, state.j),
        "optimum_wootters_concurrence": nc.wootters_concurrence(part.reduced_pair_state(best.state)),
    }
    cols = ["t_s", "delta_j_min", "phi_min_rad", "concurrence_from_squeezing", "wootters_concurrence"]
    return Report("one-axis-twisting-squeezing", cols, rows, summary, ("t_s", ["delta_j_min"]))


def _fringe_angles(grid: str) -> np.ndarray:
    phis = parse_grid(grid)
    # a closed grid repeats its first angle at 2 pi; drop the duplicate
    if len(phis) > 1 and math.isclose((phis[-1] - phis[0]) % (2 * math.pi), 0.0, abs_tol=1e-12):
        phis = phis[:-1]
    return phis


@scenario(
    "cat-fringes",
    "cat-state-parity-and-echo-fringes",
    "Cat state prepared by one-axis twisting from |m=-J> for t = pi/(2 chi). "
    "Equatorial parity and the echo-protocol sign observable versus phi, with the "
    "Fourier component of order 2J extracted from each.",
    {"j": ("spin", 8), "chi": ("float", 2 * math.pi * 1.25e6), "larmor": ("float", 0.0), "phi_grid": ("grid", "0:2pi:129")},
    ["phi_rad", "parity", "sign_echo", "echo_pi_minus_j", "echo_pi_plus_j"],
)
def _cat_fringes(cfg, seed):
    j = as_spin(cfg["j"])
    p = st.OatParams.cat_revival(cfg["chi"], cfg["larmor"])
    cat = st.one_axis_twisting(st.dicke(j, -j.j), p)
    phis = _fringe_angles(cfg["phi_grid"])
    rows = []
    for phi in phis:
        pops = nc.echo_populations(cat, phi, p)
        rows.append(
            [float(phi), nc.parity_expectation(cat, phi), float(nc.sign_weights(j) @ pops), float(pops[0]), float(pops[-1])]
        )
    data = np.array(rows)
    k = j.two_j
    summary = {"t_cat_s": p.duration, "pi_minus_j": float(cat.populations[0]), "pi_plus_j": float(cat.populations[-1])}
    summary["extremal_coherence"] = nc.extremal_coherence(cat)
    summary["overlap_bound"] = nc.cat_overlap_bound(summary["pi_minus_j"], summary["pi_plus_j"], summary["extremal_coherence"])
    if len(phis) >= 2 * k + 1:
        summary["parity_fourier_2j"] = nc.fourier_components(data[:, [0, 1]]).amplitude(k)
        summary["sign_fourier_2j"] = nc.fourier_components(data[:, [0, 2]]).amplitude(k)
    cols = ["phi_rad", "parity", "sign_echo", "echo_pi_minus_j", "echo_pi_plus_j"]
    return Report("cat-state-parity-and-echo-fringes", cols, rows, summary, ("phi_rad", ["parity", "sign_echo"]))


# quoted largest eigenvalues: (global, pair) for the W and cat preparations
_QUOTED_LAMBDAS = {"quoted-w": (0.91, 0.882), "quoted-cat": (0.66, 0.53)}


@scenario(
    "entropy-partition",
    "conditional-min-entropy-14-2",
    "Min-entropies of the spin and of its qubit pair, and their difference "
    "S(2J-2|2). Extra rows recompute the bound from published largest-eigenvalue "
    "estimates.\n" + _STATE_HELP,
    dict(_STATE_KEYS),
    ["label", "lambda_max_global", "lambda_max_pair", "conditional_min_entropy"],
)
def _entropy_partition(cfg, seed):
    state = build_state(cfg)
    pair = part.reduced_pair_state(state)
    lg, lp = float(state.eigenvalues().max()), float(pair.eigenvalues().max())
    rows = [["state", lg, lp, nc.conditional_min_entropy_14_2(state)]]
    for label, (a, b) in _QUOTED_LAMBDAS.items():
        rows.append([label, a, b, nc.conditional_min_entropy(a, b)])
    summary = {"min_entropy_global": nc.min_entropy(state), "min_entropy_pair": nc.min_entropy(pair)}
    return Report("conditional-min-entropy-14-2", ["label", "lambda_max_global", "lambda_max_pair", "conditional_min_entropy"], rows, summary)


@scenario(
    "tomography",
    "pair-state-tomography",
    "Spin-1 pair reconstruction from Husimi samples. With input set, samples are "
    "read from a CSV file (theta_rad,phi_rad,q_value[,weight]); otherwise they are "
    "synthesized from the configured state on a Fibonacci lattice, optionally with "
    "seeded shot noise.\n" + _STATE_HELP,
    {**_STATE_KEYS, "state": ("str", "w"), "input": ("str", ""), "nodes": ("int", 50), "shots": ("int", 0), "clip": ("bool", False)},
    ["row", "col", "re", "im"],
)
def _tomography(cfg, seed):
    truth = None
    if cfg["input"]:
        try:
            theta, phi, values, weights = tomo.read_husimi_csv(cfg["input"])
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg['input']}: {exc}") from None
    else:
        state = build_state(cfg)
        truth = part.reduced_pair_state(state)
        theta, phi = nc.fibonacci_sphere(cfg["nodes"])
        weights = None
        if cfg["shots"] > 0:
            q_m = np.array([part.q_dicke(state.j, m) for m in state.j.ms])
            values = np.array(
                [
                    q_m @ part.sample_projections(state, Direction(t, p), cfg["shots"], seed + i) / cfg["shots"]
                    for i, (t, p) in enumerate(zip(theta, phi))
                ]
            )
        else:
            values = part.pair_husimi_grid(truth, theta, phi)
    coeffs = tomo.fit_husimi(theta=theta, phi=phi, values=values, weights=weights)
    rec = tomo.reconstruct_pair_state(coeffs, clip=cfg["clip"])
    rows = [[i, k, float(z.real), float(z.imag)] for i in range(3) for k, z in enumerate(rec.pair.matrix[i])]
    diag = tomo.reconstruction_to_dict(rec)
    summary = {
        "basis": "+1,0,-1",
        "eigenvalues": diag["diagnostics"]["eigenvalues"],
        "physical": rec.physical,
        "clipped": rec.clipped,
        "residual_norm": coeffs.residual_norm,
        "condition_number": coeffs.condition_number,
        "samples": int(len(values)),
    }
    if truth is not None:
        summary["max_error_vs_exact"] = float(np.abs(rec.pair.matrix - truth.matrix).max())
    return Report("pair-state-tomography", ["row", "col", "re", "im"], rows, summary)


def _decay_report(anchor, sys, excited: SpinState, reference_coherence: float | None = None):
    ground = dyn.spontaneous_emission_map(sys, excited)
    pair = part.reduced_pair_state(ground)
    rows = [[float(m), float(p)] for m, p in zip(ground.j.ms, ground.populations)]
    summary = {
        "extremal_coherence": nc.extremal_coherence(ground),
        "wootters_concurrence": nc.wootters_concurrence(pair),
        "concurrence_lower_bound": nc.concurrence_lower_bound(pair)[0],
    }
    if reference_coherence:
        summary["initial_coherence"] = reference_coherence
        summary["retention_ratio"] = summary["extremal_coherence"] / reference_coherence
    return Report(anchor, ["m", "population"], rows, summary, ("m", ["population"]))


_DECAY_KEYS = {"j": ("spin", 8)}


@scenario(
    "decay-w",
    "pair-loss-from-excited-w-state",
    "Spontaneous emission from |J'=J+1, m'=-J'+1> back to the ground manifold J.",
    _DECAY_KEYS,
    ["m", "population"],
)
def _decay_w(cfg, seed):
    j = as_spin(cfg["j"])
    sys = dyn.transition_system(j, j.j + 1)
    return _decay_report("pair-loss-from-excited-w-state", sys, st.w_state(sys.j_excited))


@scenario(
    "decay-cat",
    "pair-loss-from-stretched-cat",
    "Spontaneous emission from (|J',-J'> + |J',J'>)/sqrt(2): every photon carries "
    "which-path information, so the ground coherence vanishes.",
    _DECAY_KEYS,
    ["m", "population"],
)
def _decay_cat(cfg, seed):
    j = as_spin(cfg["j"])
    sys = dyn.transition_system(j, j.j + 1)
    return _decay_report("pair-loss-from-stretched-cat", sys, st.cat_state(sys.j_excited), 0.5)


@scenario(
    "decay-psi2",
    "pair-loss-from-inner-cat",
    "Spontaneous emission from (|J',-J'+1> + |J',J'-1>)/sqrt(2): the pi-polarized "
    "channel keeps part of the coherence.",
    _DECAY_KEYS,
    ["m", "population"],
)
def _decay_psi2(cfg, seed):
    j = as_spin(cfg["j"])
    sys = dyn.transition_system(j, j.j + 1)
    je = sys.j_excited
    amps = st.basis_vector(je, -je.j + 1) + st.basis_vector(je, je.j - 1)
    return _decay_report("pair-loss-from-inner-cat", sys, st.superposition(je, amps), 0.5)


_DRIVE_KEYS = {
    "j": ("spin", 8),
    "t_pulse": ("float", 62e-9),
    "tau_excited": ("float", 1.2e-6),
    "detuning": ("float", 0.0),
}


@scenario(
    "rabi-lindblad",
    "rabi-flopping-with-spontaneous-emission",
    "Rabi flopping from |J, m> (default m = -J) to J' = J+1 under the master equation "
    "with spontaneous emission. The Rabi frequency is calibrated so that the dominant "
    "transition completes a pi pulse in t-pulse.",
    {**_DRIVE_KEYS, "m": ("float", None), "polarization": ("str", "pi"), "t_grid": ("grid", "0:200ns:101")},
    ["t_s", "excited_population", "target_population", "ground_population"],
)
def _rabi_lindblad(cfg, seed):
    j = as_spin(cfg["j"])
    m = -j.j if cfg["m"] is None else cfg["m"]
    sys = dyn.transition_system(j, j.j + 1, 1.0 / cfg["tau_excited"])
    ground = st.dicke(j, m)
    pol = cfg["polarization"]
    rabi = dyn.calibrated_rabi(sys, ground, pol, cfg["t_pulse"])
    v = np.abs(dyn.drive_operator(sys, pol))[:, j.index(m)]
    target = sys.dims[0] + int(np.argmax(v))
    times = np.unique(np.concatenate([parse_grid(cfg["t_grid"]), [cfg["t_pulse"]]]))
    joint0 = dyn.JointState.from_ground(sys, ground)
    traj = dyn.lindblad_trajectory(sys, joint0, rabi, cfg["detuning"], times, pol)
    rows = [[float(t), s.excited_population, float(s.matrix[target, target].real), 1 - s.excited_population] for t, s in zip(times, traj)]
    at_pulse = traj[int(np.searchsorted(times, cfg["t_pulse"]))]
    summary = {
        "rabi_rad_per_s": rabi,
        "target_m_excited": float(sys.j_excited.ms[target - sys.dims[0]]),
        "fidelity_at_t_pulse": float(at_pulse.matrix[target, target].real),
        "min_eigenvalue": float(min(s.eigenvalues().min() for s in traj)),
    }
    cols = ["t_s", "excited_population", "target_population", "ground_population"]
    return Report("rabi-flopping-with-spontaneous-emission", cols, rows, summary, ("t_s", ["excited_population"]))


@scenario(
    "two-pi-coherence",
    "cat-coherence-after-two-pi-pulse",
    "Ground cat state driven by a 2 pi pulse with the Rabi frequency of the pi-pulse "
    "calibration on |J,-J> (pi polarization), followed by complete decay of the "
    "remaining excited population. Reports the retained fraction of |rho_{-J,J}|.",
    {**_DRIVE_KEYS, "polarizations": ("str", "x,pi"), "decay_lifetimes": ("float", 25.0)},
    ["polarization", "pulse_duration_s", "coherence_after_pulse", "coherence_after_decay", "retention"],
)
def _two_pi(cfg, seed):
    rows = []
    for pol in [p.strip() for p in cfg["polarizations"].split(",") if p.strip()]:
        rows.append(two_pi_retention(cfg["j"], pol, cfg["t_pulse"], cfg["tau_excited"], cfg["decay_lifetimes"], cfg["detuning"]))
    cols = ["polarization", "pulse_duration_s", "coherence_after_pulse", "coherence_after_decay", "retention"]
    return Report("cat-coherence-after-two-pi-pulse", cols, rows, {})


def two_pi_retention(j, polarization: str, t_pulse: float, tau: float, decay_lifetimes: float = 25.0, detuning: float = 0.0):
    """``[polarization, duration, coherence after pulse, after decay, retention]``."""
    j = as_spin(j)
    sys = dyn.transition_system(j, j.j + 1, 1.0 / tau)
    rabi = dyn.calibrated_rabi(sys, st.dicke(j, -j.j), "pi", t_pulse)
    cat = st.cat_state(j)
    duration = dyn.pulse_duration(sys, cat, polarization, rabi, 2 * math.pi)
    joint = dyn.lindblad_evolve(sys, dyn.JointState.from_ground(sys, cat), rabi, detuning, duration, polarization)
    after_pulse = float(abs(joint.ground_block[0, -1]))
    final = dyn.lindblad_evolve(sys, joint, 0.0, 0.0, decay_lifetimes * tau, polarization)
    after_decay = float(abs(final.ground_block[0, -1]))
    return [polarization, duration, after_pulse, after_decay, after_decay / nc.extremal_coherence(cat)]


# ---------------------------------------------------------------- output


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v == 0:
            return "0"
        return f"{v:.15g}"
    return str(value)


def metadata(name: str, cfg: dict, seed: int, report: Report) -> dict:
    return {
        "tool": "spinpart",
        "version": TOOL_VERSION,
        "scenario": name,
        "anchor": report.anchor,
        "seed": seed,
        "config_sha256": config_hash(name, cfg),
        "config": cfg,
    }


def render_csv(name: str, cfg: dict, seed: int, report: Report) -> str:
    import csv
    import io

    meta = metadata(name, cfg, seed, report)
    buf = io.StringIO()
    for key in ("tool", "version", "scenario", "anchor", "seed", "config_sha256"):
        buf.write(f"# {key}: {meta[key]}\r\n")
    buf.write(f"# config: {canonical_json(cfg)}\r\n")
    for key in sorted(report.summary):
        value = report.summary[key]
        text = ",".join(_fmt(v) for v in value) if isinstance(value, (list, tuple)) else _fmt(value)
        buf.write(f"# summary.{key}: {text}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_json(name: str, cfg: dict, seed: int, report: Report) -> str:
    doc = {
        "metadata": metadata(name, cfg, seed, report),
        "summary": report.summary,
        "columns": report.columns,
        "rows": report.rows,
    }
    if name == "tomography":
        matrix = np.zeros((3, 3), dtype=complex)
        for i, k, re_, im_ in report.rows:
            matrix[i, k] = complex(re_, im_)
        doc["matrix"] = tomo.matrix_to_json(matrix)
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def render_svg(report: Report, path) -> None:
    """Line plot of the report's plot columns (needs matplotlib)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "spinpart"
    x_col, y_cols = report.plot
    data = {c: [row[i] for row in report.rows] for i, c in enumerate(report.columns)}
    fig, ax = plt.subplots(figsize=(6, 4))
    for col in y_cols:
        ax.plot(data[x_col], data[col], marker=".", label=col)
    ax.set_xlabel(x_col)
    ax.legend()
    ax.set_title(report.anchor)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
