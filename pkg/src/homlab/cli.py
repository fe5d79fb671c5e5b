"""Command-line experiment registry.

``homlab list`` prints every experiment. ``homlab run NAME`` writes CSV
tables plus a matplotlib script that plots them. Parameters come from a JSON
object (``--config``); each ``--set key=value`` overrides a JSON key.

Exit codes: 0 success, 2 bad arguments or schema, 3 infeasible bound,
4 internal invariant violation.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import click
import numpy as np

from . import bounds, collision, heisenberg, paradox, qcore

EXIT_SCHEMA = 2
EXIT_INFEASIBLE = 3
EXIT_INVARIANT = 4


class SchemaError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class Param:
    kind: type
    default: Any
    check: Callable[[Any], bool] = lambda v: True
    help: str = ""
    choices: tuple[str, ...] = ()


@dataclass
class CsvTable:
    name: str
    header: list[str]
    rows: list[list[Any]]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for r in self.rows:
            if len(r) != len(self.header):
                raise InvariantViolation(f"table {self.name} is not rectangular")


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    figure: str
    schema: dict[str, Param]
    run: Callable[[dict[str, Any]], list[CsvTable]]
    plot: Callable[[list[CsvTable]], str]


def fmt(v: Any) -> str:
    """Shortest round-trip text for numbers; plain text otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0.0:
            return "0.0"
        return repr(v)
    return str(v)


def render_csv(table: CsvTable, params: dict[str, Any]) -> str:
    lines = [f"#experiment_table={table.name}"]
    for k in sorted(params):
        lines.append(f"#{k}={fmt(params[k])}")
    for k in sorted(table.metadata):
        lines.append(f"#{k}={fmt(table.metadata[k])}")
    lines.append(",".join(table.header))
    for r in table.rows:
        lines.append(",".join(fmt(v) for v in r))
    return "\n".join(lines) + "\n"


def validate(schema: dict[str, Param], raw: dict[str, Any]) -> dict[str, Any]:
    out = {k: p.default for k, p in schema.items()}
    for key, value in raw.items():
        if key not in schema:
            raise SchemaError(f"unknown parameter {key!r}; valid: {', '.join(sorted(schema))}")
        p = schema[key]
        try:
            if p.kind is bool:
                if isinstance(value, str):
                    if value.lower() not in ("true", "false", "1", "0"):
                        raise ValueError(value)
                    value = value.lower() in ("true", "1")
                else:
                    value = bool(value)
            elif p.kind is int:
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError(value)
                value = int(value)
            elif p.kind is float:
                value = float(value)
            else:
                value = str(value)
        except (TypeError, ValueError):
            raise SchemaError(f"parameter {key!r} expects {p.kind.__name__}, got {value!r}") from None
        if p.choices and value not in p.choices:
            raise SchemaError(f"parameter {key!r} must be one of {', '.join(p.choices)}")
        if not p.check(value):
            raise SchemaError(f"parameter {key!r} out of range: {value!r}")
        out[key] = value
    return out


def _plot_header(tables: list[CsvTable]) -> str:
    return (
        "import numpy as np\n"
        "import matplotlib.pyplot as plt\n\n\n"
        "def load(path):\n"
        "    with open(path) as fh:\n"
        "        rows = [l for l in fh if not l.startswith('#')]\n"
        "    names = rows[0].strip().split(',')\n"
        "    data = np.genfromtxt(rows[1:], delimiter=',', dtype=None, encoding='utf-8', names=names)\n"
        "    return data\n\n\n"
    )


def _line_plot(x: str, ys: list[str], table: str, xlabel: str, ylabel: str, logy: bool = False) -> Callable[[list[CsvTable]], str]:
    def make(tables: list[CsvTable]) -> str:
        body = _plot_header(tables)
        body += f"d = load('{table}.csv')\n"
        for y in ys:
            body += f"plt.plot(d['{x}'], d['{y}'], label='{y}')\n"
        if logy:
            body += "plt.yscale('log')\n"
        body += f"plt.xlabel('{xlabel}')\nplt.ylabel('{ylabel}')\nplt.legend()\nplt.savefig('{table}.png', dpi=150)\n"
        return body

    return make


def _positive(v: float) -> bool:
    return v > 0


def _rel_det(p: dict[str, Any]) -> list[CsvTable]:
    tasks = ["pure_to_mixed", "mixed_to_pure"] if p["task"] == "both" else [p["task"]]
    tables = []
    diag = {}
    for t in tasks:
        s = collision.deterioration_surface(p["eta"], t, p["n_max"], p["N_max"], p["diagonal_from"])
        rows = [
            [n, N, s.eps[n - 1, N - 1], s.delta[n - 1, N - 1], s.R[n - 1, N - 1]]
            for n in range(1, p["n_max"] + 1)
            for N in range(1, p["N_max"] + 1)
        ]
        tables.append(CsvTable(f"rel_det_{t}", ["n", "N", "eps", "delta", "R"], rows,
                               {"classification": s.classification.value, "slope": s.slope}))
        diag[t] = s.diagonal()[1]
    k = min(p["n_max"], p["N_max"])
    header = ["k"] + [f"R_{t}" for t in tasks]
    rows = [[i] + [diag[t][i - 1] for t in tasks] for i in range(1, k + 1)]
    tables.append(CsvTable("rel_det_diagonal", header, rows))
    return tables


def _resources(p: dict[str, Any]) -> list[CsvTable]:
    ns = range(1, p["n_max"] + 1)
    a = bounds.resources_curve(p["target_error"], p["eta"], "pure_to_mixed", ns, p["N_cap"])
    b = bounds.resources_curve(p["target_error"], p["eta"], "mixed_to_pure", ns, p["N_cap"])
    rows = [[x.n, x.N, y.N, x.saturated, y.saturated] for x, y in zip(a, b)]
    return [CsvTable("resources", ["n", "N_pure_to_mixed", "N_mixed_to_pure", "sat_ptm", "sat_mtp"], rows)]


def _random_perpendicular(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, float]:
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    v = rng.normal(size=3)
    v -= (v @ u) * u
    v /= np.linalg.norm(v)
    alpha, beta = rng.uniform(0.0, 1.0, size=2)
    eta = rng.uniform(0.0, math.pi / 2)
    return beta * v, alpha * u, eta


def gap_samples(samples: int, seed: int) -> list[list[Any]]:
    """Rows (alpha, beta, eta, F_inc, F_coh, gap, bound, exceeds) for random perpendicular pairs."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(samples):
        sys_b, res_b, eta = _random_perpendicular(rng)
        f_inc, f_coh, gap = bounds.measured_fidelity_gap(sys_b, res_b, eta)
        alpha = float(np.linalg.norm(res_b))
        bound = bounds.cswap_fidelity_gap(alpha)
        rows.append([alpha, float(np.linalg.norm(sys_b)), eta, f_inc, f_coh, gap, bound, gap > bound])
    return rows


def _cswap_gap(p: dict[str, Any]) -> list[CsvTable]:
    xs = np.linspace(0.0, 1.0, p["grid"])
    amax, vmax = bounds.cswap_gap_maximum()
    curve = CsvTable("gap_bound", ["alpha", "bound"], [[x, bounds.cswap_fidelity_gap(x)] for x in xs],
                     {"argmax_alpha": amax, "max_bound": vmax})
    rows = gap_samples(p["samples"], p["seed"])
    exceed = sum(1 for r in rows if r[-1])
    samples = CsvTable("gap_samples", ["alpha", "beta", "eta", "F_inc", "F_coh", "gap", "bound", "exceeds"], rows,
                       {"exceed_count": exceed})
    return [curve, samples]


def _cswap_bounds(p: dict[str, Any]) -> list[CsvTable]:
    N = bounds.min_reservoir_size(p["delta"], p["d"])
    d_sys, d_res = bounds.convergence_distances(p["delta"], p["d"], N)
    d_prev = bounds.convergence_distances(p["delta"], p["d"], N - 1)[0] if N > 1 else float("nan")
    n_reuse = bounds.max_reuses(p["delta"], p["d"], p["eta"])
    summary = CsvTable("convergence", ["N", "D_system", "D_reservoir_1", "D_system_N_minus_1", "max_reuses"],
                       [[N, d_sys, d_res, d_prev, n_reuse]])
    rows = []
    for n in range(1, p["n_max"] + 1):
        rows.append([n, bounds.reuse_reservoir_bound(p["Delta"], p["d"], n, p["eta"]),
                     bounds.reused_distance(p["d"], n, p["eta"])])
    return [summary, CsvTable("reuse_bound", ["n", "N_min", "d_prime"], rows)]


def _nmr(p: dict[str, Any]) -> list[CsvTable]:
    rows = []
    worst = 0.0
    for eta in np.linspace(0.0, math.pi / 2, p["grid"]):
        r = collision.nmr_circuit(float(eta))
        worst = max(worst, r.max_deviation())
        rows.append([float(eta)] + [r.f[k] for k in "ABCD"] + [r.f_closed[k] for k in "ABCD"]
                    + [r.entropy[k] for k in "ABCD"])
    if worst > 1e-10:
        raise InvariantViolation(f"NMR simulation deviates from closed forms by {worst!r}")
    header = ["eta"] + [f"f_{k}" for k in "ABCD"] + [f"f_{k}_closed" for k in "ABCD"] + [f"S_{k}" for k in "ABCD"]
    return [CsvTable("nmr", header, rows, {"max_abs_deviation": worst})]


def _hardy(p: dict[str, Any]) -> list[CsvTable]:
    scan = paradox.scan_hardy(p["grid"])
    table = CsvTable("hardy_scan", list(scan.columns), [list(r) for r in scan.rows])
    arg = CsvTable("hardy_argmax", ["quantity", "a", "a_squared", "value"],
                   [[k, a, a * a, v] for k, (a, v) in sorted(scan.argmax.items())])
    return [table, arg]


def _distribution_table(name: str, out: paradox.CircuitOutcome, meta: dict[str, Any]) -> CsvTable:
    rows = [[k, out.bits.get(k, k), v] for k, v in sorted(out.distribution.items())]
    return CsvTable(name, ["outcome", "bits", "probability"], rows, meta)


def _check_normalized(out: paradox.CircuitOutcome) -> None:
    total = sum(out.distribution.values())
    if abs(total - 1.0) > 1e-10:
        raise InvariantViolation(f"outcome probabilities sum to {total!r}")


def _penrose(p: dict[str, Any]) -> list[CsvTable]:
    alpha = p["alpha"]
    beta = math.sqrt(1.0 - alpha * alpha)
    out = paradox.penrose_circuit(alpha, beta)
    _check_normalized(out)
    ov = paradox.penrose_overlap(alpha, beta)
    return [_distribution_table("penrose", out, {"overlap_minus_minus": abs(ov), "forbidden": out.forbidden or ""})]


def _fr(p: dict[str, Any]) -> list[CsvTable]:
    variants = [paradox.FR_ORIGINAL, paradox.FR_OBSERVER] if p["variant"] == "both" else [p["variant"]]
    tables = []
    for v in variants:
        out = paradox.fr_circuit(v)
        _check_normalized(out)
        tables.append(_distribution_table(f"fr_{v}", out, {}))
    return tables


def _pigeonhole(p: dict[str, Any]) -> list[CsvTable]:
    pair = tuple(int(c) for c in p["pair"].split("-"))
    out = paradox.pigeonhole_circuit(pair, p["insert_check"])
    _check_normalized(out)
    meta: dict[str, Any] = {"p_all_plus_i": out.success_probability}
    if p["insert_check"]:
        same = lambda k: k[3] == "0"
        meta["p_same"] = out.probability(same)
        meta["p_all_plus_i_given_same"] = out.conditional(lambda k: k[:3] == "000", same)
    return [_distribution_table("pigeonhole", out, meta)]


def random_two_qubit_ops(rng: np.random.Generator, layers: int = 3) -> list[tuple[qcore.Gate, tuple[int, ...]]]:
    """Random single-qubit unitaries interleaved with CNOTs."""
    from scipy.stats import unitary_group

    ops = []
    for _ in range(layers):
        for q in (0, 1):
            ops.append((qcore.standard_gate("custom", matrix=unitary_group.rvs(2, random_state=rng)), (q,)))
        ops.append((qcore.standard_gate("CNOT"), (0, 1)))
    for q in (0, 1):
        ops.append((qcore.standard_gate("custom", matrix=unitary_group.rvs(2, random_state=rng)), (q,)))
    return ops


def _info(p: dict[str, Any]) -> list[CsvTable]:
    rng = np.random.default_rng(p["seed"])
    rows = []
    worst = 0.0
    for i in range(p["samples"]):
        net = heisenberg.run_circuit(heisenberg.init_network(2), random_two_qubit_ops(rng))
        rep = heisenberg.info_report(net)
        total = rep.inacc + sum(rep.acc_per_qubit)
        worst = max(worst, abs(total - rep.acc_network))
        rows.append([i, rep.acc_per_qubit[0], rep.acc_per_qubit[1], rep.inacc, total])
    if worst > 1e-9:
        raise InvariantViolation(f"information total deviates from n by {worst!r}")
    return [CsvTable("info_conservation", ["sample", "acc_1", "acc_2", "inacc", "total"], rows,
                     {"max_abs_deviation": worst})]


def _bar_plot(table: str) -> Callable[[list[CsvTable]], str]:
    def make(tables: list[CsvTable]) -> str:
        body = _plot_header(tables)
        names = [t.name for t in tables]
        for i, nm in enumerate(names):
            body += f"d = load('{nm}.csv')\nplt.figure({i})\n"
            body += "plt.bar([str(o) for o in d['outcome']], d['probability'])\n"
            body += f"plt.xticks(rotation=90)\nplt.ylabel('probability')\nplt.tight_layout()\nplt.savefig('{nm}.png', dpi=150)\n"
        return body

    return make


def _surface_plot(tables: list[CsvTable]) -> str:
    body = _plot_header(tables)
    body += "d = load('rel_det_diagonal.csv')\n"
    body += "for name in d.dtype.names[1:]:\n    plt.plot(d['k'], d[name], label=name)\n"
    body += "plt.xlabel('N = n')\nplt.ylabel('R')\nplt.yscale('log')\nplt.legend()\nplt.savefig('rel_det_diagonal.png', dpi=150)\n"
    return body


REGISTRY: dict[str, Experiment] = {}


def _register(e: Experiment) -> None:
    REGISTRY[e.name] = e


_register(Experiment(
    "rel-det-surface", "error, robustness and relative deterioration over (n, N) with limit classification",
    "fig: relative deterioration",
    {
        "eta": Param(float, 0.01, lambda v: 0 < v <= math.pi / 2),
        "n_max": Param(int, 60, lambda v: 2 <= v <= 400),
        "N_max": Param(int, 60, lambda v: 2 <= v <= 400),
        "diagonal_from": Param(int, 1, lambda v: v >= 1),
        "task": Param(str, "both", choices=("both", "pure_to_mixed", "mixed_to_pure")),
    },
    _rel_det, _surface_plot,
))
_register(Experiment(
    "resources-curve", "minimal reservoir size N for n uses at a target error, both tasks",
    "fig: resources",
    {
        "target_error": Param(float, 0.1, lambda v: 0 < v < 1),
        "eta": Param(float, 0.3, lambda v: 0 < v <= math.pi / 2),
        "n_max": Param(int, 60, lambda v: 1 <= v <= 200),
        "N_cap": Param(int, 3000, lambda v: 1 <= v <= 20000),
    },
    _resources, _line_plot("n", ["N_pure_to_mixed", "N_mixed_to_pure"], "resources", "n", "N"),
))
_register(Experiment(
    "cswap-gap", "fidelity-gap bound curve and exact CSWAP/PSWAP gaps on random perpendicular pairs",
    "fig: bounding fidelity difference",
    {
        "grid": Param(int, 201, lambda v: v >= 3),
        "samples": Param(int, 1000, lambda v: v >= 0),
        "seed": Param(int, 0, lambda v: v >= 0),
    },
    _cswap_gap, _line_plot("alpha", ["bound"], "gap_bound", "alpha", "bound"),
))
_register(Experiment(
    "cswap-bounds", "trace-distance convergence bound, reuse limit and worst-case reuse reservoir size",
    "fig: trace distance bounds",
    {
        "delta": Param(float, 0.1, _positive),
        "d": Param(float, 2.0, lambda v: 0 < v <= 2),
        "eta": Param(float, 0.1, lambda v: 0 <= v < math.pi / 2),
        "Delta": Param(float, 0.1, _positive),
        "n_max": Param(int, 5, lambda v: v >= 1),
    },
    _cswap_bounds, _line_plot("n", ["N_min"], "reuse_bound", "n", "N_min"),
))
_register(Experiment(
    "nmr-circuit", "four-qubit chain homogenizer: simulated and closed-form f and entropies",
    "fig: VN_B_and_C",
    {"grid": Param(int, 50, lambda v: v >= 2)},
    _nmr, _line_plot("eta", ["f_A", "f_B", "f_C", "f_D", "S_B", "S_C"], "nmr", "eta", "value"),
))
_register(Experiment(
    "hardy-scan", "symmetric Hardy family: entropy, paradox probabilities and incompatibilities",
    "fig: incompatibility",
    {"grid": Param(int, 1000, lambda v: v >= 100)},
    _hardy, _line_plot("a", ["S_tot", "P_paradox", "P_Hardy", "I1", "I12"], "hardy_scan", "a", "value"),
))
_register(Experiment(
    "penrose", "two-qubit Penrose-triangle circuit outcome distribution",
    "fig: original short",
    {"alpha": Param(float, math.sqrt(1 / 3), lambda v: 0 <= v <= 1)},
    _penrose, _bar_plot("penrose"),
))
_register(Experiment(
    "fr", "Frauchiger-Renner circuit in the Bell basis, with and without an external observer",
    "fig: FR observers",
    {"variant": Param(str, "both", choices=("both", paradox.FR_ORIGINAL, paradox.FR_OBSERVER))},
    _fr, _bar_plot("fr"),
))
_register(Experiment(
    "pigeonhole", "three-qubit pigeonhole circuit with optional same/different check",
    "fig: pigeonhole circuit",
    {
        "pair": Param(str, "1-2", choices=("1-2", "1-3", "2-3")),
        "insert_check": Param(bool, True),
    },
    _pigeonhole, _bar_plot("pigeonhole"),
))
_register(Experiment(
    "info-conservation", "accessible plus inaccessible information on random pure two-qubit networks",
    "table: tableofinformation",
    {
        "samples": Param(int, 200, lambda v: v >= 1),
        "seed": Param(int, 0, lambda v: v >= 0),
    },
    _info, _line_plot("sample", ["acc_1", "acc_2", "inacc", "total"], "info_conservation", "sample", "bits"),
))


def run_experiment(name: str, raw: dict[str, Any], out_dir: Path) -> list[Path]:
    if name not in REGISTRY:
        raise SchemaError(f"unknown experiment {name!r}; valid: {', '.join(sorted(REGISTRY))}")
    exp = REGISTRY[name]
    params = validate(exp.schema, raw)
    tables = exp.run(params)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for t in tables:
        path = out_dir / f"{t.name}.csv"
        path.write_text(render_csv(t, {"experiment": name, **params}), encoding="utf-8")
        written.append(path)
    script = out_dir / "plot.py"
    script.write_text(exp.plot(tables), encoding="utf-8")
    written.append(script)
    return written


def _parse_set(items: tuple[str, ...]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for item in items:
        if "=" not in item:
            raise SchemaError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = json.loads(v)
        except json.JSONDecodeError:
            out[k.strip()] = v
    return out


@click.group()
def main() -> None:
    """Homogenizer, descriptor and paradox experiments."""


@main.command("list")
def list_cmd() -> None:
    """List registered experiments."""
    for name in sorted(REGISTRY):
        e = REGISTRY[name]
        click.echo(f"{name}\t{e.description}\t[{e.figure}]")


@main.command("run")
@click.argument("name")
@click.option("--config", "config", type=click.Path(dir_okay=False), default=None, help="JSON object of parameters.")
@click.option("--set", "sets", multiple=True, help="Override one parameter, key=value.")
@click.option("--out", "out", type=click.Path(file_okay=False), default="out", show_default=True)
def run_cmd(name: str, config: str | None, sets: tuple[str, ...], out: str) -> None:
    """Run experiment NAME and write its CSV tables and plot script."""
    try:
        raw: dict[str, Any] = {}
        if config:
            try:
                raw = json.loads(Path(config).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise SchemaError(f"cannot read config {config!r}: {exc}") from None
            if not isinstance(raw, dict):
                raise SchemaError("config must be a JSON object")
        raw.update(_parse_set(sets))
        written = run_experiment(name, raw, Path(out) / name)
    except (SchemaError, qcore.QuantumStateError) as exc:
        if isinstance(exc, bounds.BoundError):
            click.echo(f"infeasible: {exc}", err=True)
            sys.exit(EXIT_INFEASIBLE)
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_SCHEMA)
    except bounds.BoundError as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except InvariantViolation as exc:
        click.echo(f"invariant violated: {exc}", err=True)
        sys.exit(EXIT_INVARIANT)
    for p in written:
        click.echo(str(p))


if __name__ == "__main__":
    main()
